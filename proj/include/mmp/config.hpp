// config.hpp: run configuration, parsed from flat key = value text with
// [section] headers. Unknown sections or keys are hard errors, so a config
// echoed into a manifest always reparses to the same run.

#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mmp/dynamics.hpp"

namespace mmp {

enum class Preset { taylor_green, single_mode, random_seeded };
enum class SolverKind { imex, picard };

struct RunConfig {
    // [grid]
    int n = 0;
    double box_length = 2.0 * std::numbers::pi;
    // [params]
    MmpParams params;
    // [initial]
    Preset preset = Preset::taylor_green;
    double amp_u = 1.0;
    double amp_omega = 0.5;
    double amp_b = 0.5;
    std::uint64_t seed = 1;
    int k_cut = 0; // random_seeded band limit; 0 means n/3
    // [solver]
    SolverKind solver = SolverKind::imex;
    double t_final = -1.0;
    double dt = 0.0;     // give dt or time_nodes, not both
    int time_nodes = 0;
    double s = 2.0;
    int max_iters = 30;
    double cauchy_tol = 1e-10;
    int truncation_offset = 2;
    // [output]
    std::string output_dir = "out";
    int cadence = 10;
    int snapshot_stride = 0;
    std::vector<double> epsilons = {0.02, 0.01, 0.005};
    double delta_warn = std::numeric_limits<double>::infinity();
    std::vector<double> hs_list = {2.0};
    std::vector<double> lp_list = {};

    int derived_time_nodes() const {
        if (time_nodes > 0)
            return time_nodes;
        return static_cast<int>(std::ceil(t_final / dt - 1e-12));
    }
    double derived_dt() const {
        if (dt > 0.0)
            return dt;
        return t_final / time_nodes;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& v, int line,
                                             const char* key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "': bad number '" + item + "'");
        }
    }
    return out;
}

} // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    bool have_n = false, have_t = false, have_dt = false, have_nodes = false,
         have_preset = false, have_solver = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "params" && section != "initial" &&
                section != "solver" && section != "output")
                throw ParseError("line " + std::to_string(line_no) + ": unknown section '" +
                                 section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key or value");

        auto bad_key = [&]() -> ParseError {
            return ParseError("line " + std::to_string(line_no) + ": unknown key '" + key +
                              "' in section [" + section + "]");
        };
        auto as_double = [&]() {
            try {
                std::size_t used = 0;
                const double d = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument("");
                return d;
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                                 "': bad number '" + value + "'");
            }
        };
        auto as_int = [&]() {
            const double d = as_double();
            const int i = static_cast<int>(d);
            if (d != i)
                throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                                 "': expected an integer");
            return i;
        };

        if (section == "grid") {
            if (key == "n") {
                cfg.n = as_int();
                have_n = true;
            } else if (key == "box_length")
                cfg.box_length = as_double();
            else
                throw bad_key();
        } else if (section == "params") {
            if (key == "mu")
                cfg.params.mu = as_double();
            else if (key == "chi")
                cfg.params.chi = as_double();
            else if (key == "kappa")
                cfg.params.kappa = as_double();
            else if (key == "gamma")
                cfg.params.gamma = as_double();
            else if (key == "nu")
                cfg.params.nu = as_double();
            else
                throw bad_key();
        } else if (section == "initial") {
            if (key == "preset") {
                if (value == "taylor_green")
                    cfg.preset = Preset::taylor_green;
                else if (value == "single_mode")
                    cfg.preset = Preset::single_mode;
                else if (value == "random_seeded")
                    cfg.preset = Preset::random_seeded;
                else
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": unknown preset '" + value + "'");
                have_preset = true;
            } else if (key == "amp_u")
                cfg.amp_u = as_double();
            else if (key == "amp_omega")
                cfg.amp_omega = as_double();
            else if (key == "amp_b")
                cfg.amp_b = as_double();
            else if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(as_double());
            else if (key == "k_cut")
                cfg.k_cut = as_int();
            else
                throw bad_key();
        } else if (section == "solver") {
            if (key == "type") {
                if (value == "imex")
                    cfg.solver = SolverKind::imex;
                else if (value == "picard")
                    cfg.solver = SolverKind::picard;
                else
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": unknown solver '" + value + "'");
                have_solver = true;
            } else if (key == "T") {
                cfg.t_final = as_double();
                have_t = true;
            } else if (key == "dt") {
                cfg.dt = as_double();
                have_dt = true;
            } else if (key == "time_nodes") {
                cfg.time_nodes = as_int();
                have_nodes = true;
            } else if (key == "s")
                cfg.s = as_double();
            else if (key == "max_iters")
                cfg.max_iters = as_int();
            else if (key == "cauchy_tol")
                cfg.cauchy_tol = as_double();
            else if (key == "truncation_offset")
                cfg.truncation_offset = as_int();
            else
                throw bad_key();
        } else if (section == "output") {
            if (key == "dir")
                cfg.output_dir = value;
            else if (key == "cadence")
                cfg.cadence = as_int();
            else if (key == "snapshot_stride")
                cfg.snapshot_stride = as_int();
            else if (key == "epsilons")
                cfg.epsilons = detail::parse_double_list(value, line_no, "epsilons");
            else if (key == "delta_warn")
                cfg.delta_warn = as_double();
            else if (key == "hs_list")
                cfg.hs_list = detail::parse_double_list(value, line_no, "hs_list");
            else if (key == "lp_list")
                cfg.lp_list = detail::parse_double_list(value, line_no, "lp_list");
            else
                throw bad_key();
        } else {
            throw ParseError("line " + std::to_string(line_no) +
                             ": key outside of any section");
        }
    }

    // validation: every positivity constraint is enforced here, at parse time
    if (!have_n)
        throw ValidationError("grid.n is required");
    if (cfg.n < 8 || cfg.n % 2 != 0)
        throw ValidationError("n must be even and >= 8");
    if (!(cfg.box_length > 0.0))
        throw ValidationError("box_length must be positive");
    cfg.params.validate(); // mu/gamma/nu positive, chi/kappa nonnegative
    if (!have_preset)
        throw ValidationError("initial.preset is required");
    if (!have_solver)
        throw ValidationError("solver.type is required");
    if (!have_t || cfg.t_final < 0.0)
        throw ValidationError("solver.T is required and must be nonnegative");
    if (cfg.t_final > 0.0) {
        if (have_dt == have_nodes)
            throw ValidationError("specify exactly one of solver.dt and solver.time_nodes");
        if (have_dt && !(cfg.dt > 0.0))
            throw ValidationError("dt must be positive");
        if (have_nodes && cfg.time_nodes < 1)
            throw ValidationError("time_nodes must be >= 1");
    }
    if (!(cfg.s > 1.5))
        throw ValidationError("s must exceed 3/2");
    if (cfg.cadence < 0 || cfg.snapshot_stride < 0)
        throw ValidationError("cadence and snapshot_stride must be nonnegative");
    if (cfg.max_iters < 1 || !(cfg.cauchy_tol > 0.0))
        throw ValidationError("bad picard iteration controls");
    for (double e : cfg.epsilons)
        if (!(e > 0.0))
            throw ValidationError("epsilons must be positive");
    if (cfg.k_cut < 0)
        throw ValidationError("k_cut must be nonnegative");
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace detail {

inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ",";
        out += format_full(v[i]);
    }
    return out;
}

} // namespace detail

// Canonical text form; parse_config_text(serialize_config(c)) reproduces c.
inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    auto d = [](double v) { return detail::format_full(v); };
    o << "[grid]\n";
    o << "n = " << c.n << "\n";
    o << "box_length = " << d(c.box_length) << "\n";
    o << "\n[params]\n";
    o << "mu = " << d(c.params.mu) << "\n";
    o << "chi = " << d(c.params.chi) << "\n";
    o << "kappa = " << d(c.params.kappa) << "\n";
    o << "gamma = " << d(c.params.gamma) << "\n";
    o << "nu = " << d(c.params.nu) << "\n";
    o << "\n[initial]\n";
    o << "preset = "
      << (c.preset == Preset::taylor_green
              ? "taylor_green"
              : c.preset == Preset::single_mode ? "single_mode" : "random_seeded")
      << "\n";
    o << "amp_u = " << d(c.amp_u) << "\n";
    o << "amp_omega = " << d(c.amp_omega) << "\n";
    o << "amp_b = " << d(c.amp_b) << "\n";
    o << "seed = " << c.seed << "\n";
    o << "k_cut = " << c.k_cut << "\n";
    o << "\n[solver]\n";
    o << "type = " << (c.solver == SolverKind::imex ? "imex" : "picard") << "\n";
    o << "T = " << d(c.t_final) << "\n";
    if (c.dt > 0.0)
        o << "dt = " << d(c.dt) << "\n";
    else if (c.time_nodes > 0)
        o << "time_nodes = " << c.time_nodes << "\n";
    o << "s = " << d(c.s) << "\n";
    o << "max_iters = " << c.max_iters << "\n";
    o << "cauchy_tol = " << d(c.cauchy_tol) << "\n";
    o << "truncation_offset = " << c.truncation_offset << "\n";
    o << "\n[output]\n";
    o << "dir = " << c.output_dir << "\n";
    o << "cadence = " << c.cadence << "\n";
    o << "snapshot_stride = " << c.snapshot_stride << "\n";
    if (!c.epsilons.empty())
        o << "epsilons = " << detail::format_list(c.epsilons) << "\n";
    if (!std::isinf(c.delta_warn))
        o << "delta_warn = " << d(c.delta_warn) << "\n";
    if (!c.hs_list.empty())
        o << "hs_list = " << detail::format_list(c.hs_list) << "\n";
    if (!c.lp_list.empty())
        o << "lp_list = " << detail::format_list(c.lp_list) << "\n";
    return o.str();
}

} // namespace mmp
