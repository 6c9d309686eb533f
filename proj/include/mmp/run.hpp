// run.hpp: drives one configured run end to end and writes the output
// artifacts: diagnostics.csv, manifest.txt, snapshots. Outputs are
// byte-deterministic for a fixed config and seed (single-threaded,
// fixed-order reductions, no timestamps, %.17g formatting).

#pragma once

#include <filesystem>
#include <iostream>

#include "mmp/config.hpp"
#include "mmp/presets.hpp"
#include "mmp/snapshot.hpp"
#include "mmp/time_integration.hpp"

namespace mmp {

inline constexpr const char* kVersionString = "mmp 1.0.0";

inline MmpState build_initial_state(const RunConfig& cfg, const Grid& grid) {
    const PresetAmplitudes amp{cfg.amp_u, cfg.amp_omega, cfg.amp_b};
    switch (cfg.preset) {
    case Preset::taylor_green:
        return make_taylor_green(grid, amp);
    case Preset::single_mode:
        return make_single_mode(grid, amp);
    case Preset::random_seeded:
        return make_random_seeded(grid, amp, cfg.seed, cfg.k_cut);
    }
    throw ValidationError("unknown preset");
}

namespace detail {

inline std::string format_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string csv_header(const RunConfig& cfg, const DyadicProfile& prof) {
    std::string h = "time,E_u,E_omega,E_b,D_grad_u,D_grad_omega,D_grad_b,D_div_omega,D_omega";
    for (double s : cfg.hs_list)
        h += ",hs_" + format_label(s);
    h += ",curl_H,curl_I,curl_J";
    for (int j = prof.j_min; j <= prof.j_max; ++j)
        h += ",blocksup_" + std::to_string(j);
    for (double e : cfg.epsilons)
        h += ",delta_" + format_label(e);
    return h;
}

inline std::string csv_row(const DiagnosticsRecord& r, const RunConfig& cfg,
                           const DyadicProfile& prof, const std::vector<double>& deltas) {
    std::string row = format_full(r.time);
    for (double v : r.l2_energy)
        row += "," + format_full(v);
    for (double v : r.dissipation)
        row += "," + format_full(v);
    for (double s : cfg.hs_list)
        row += "," + format_full(r.hs_norms.count(s) ? r.hs_norms.at(s) : 0.0);
    for (double v : r.curl_l2)
        row += "," + format_full(v);
    for (int j = prof.j_min; j <= prof.j_max; ++j)
        row += "," + format_full(r.block_sups.count(j) ? r.block_sups.at(j) : 0.0);
    for (double v : deltas)
        row += "," + format_full(v);
    return row;
}

} // namespace detail

// Executes the configured run. Returns the process exit code: 0 on
// completion, 2 on instability (last good snapshot persisted).
inline int run(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    std::string out_dir = cfg.output_dir;
    if (const char* env = std::getenv("MMP_OUTPUT_DIR"); env && *env)
        out_dir = env;
    fs::create_directories(out_dir);
    auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

    const Grid grid(cfg.n, cfg.box_length);
    const DyadicProfile profile = build_profile(grid);
    const MmpState initial = build_initial_state(cfg, grid);
    const double dt = cfg.t_final > 0.0 ? cfg.derived_dt() : 0.0;
    const int steps = cfg.t_final > 0.0 ? cfg.derived_time_nodes() : 0;

    RecordOptions ropts;
    ropts.hs_list = cfg.hs_list;
    ropts.lp_list = cfg.lp_list;

    DiagnosticsSeries series;
    series.params = cfg.params;
    series.grid_n = grid.n();
    series.box_length = grid.box_length();
    series.j_min = profile.j_min;
    series.j_max = profile.j_max;

    std::string picard_summary;
    bool unstable = false;
    double unstable_time = 0.0;
    MmpState last_good = initial;

    // manifest first: config echo, derived quantities, versions
    {
        std::ofstream man(path("manifest.txt"));
        man << "version = " << kVersionString << "\n";
        man << "block_range_j_min = " << profile.j_min << "\n";
        man << "block_range_j_max = " << profile.j_max << "\n";
        man << "derived_dt = " << detail::format_full(dt) << "\n";
        man << "derived_steps = " << steps << "\n";
        man << "t0_estimate_c0_c1_1 = "
            << detail::format_full(estimate_t0(initial.u, initial.omega, initial.b, cfg.s))
            << "\n";
        man << "\n# config echo\n" << serialize_config(cfg);
    }

    if (cfg.solver == SolverKind::picard && cfg.t_final > 0.0) {
        PicardConfig pc;
        pc.s = cfg.s;
        pc.t_final = cfg.t_final;
        pc.time_nodes = steps;
        pc.max_iters = cfg.max_iters;
        pc.cauchy_tol = cfg.cauchy_tol;
        pc.truncation_offset = cfg.truncation_offset;
        auto [traj, rep] = picard_solve(initial.u, initial.omega, initial.b, cfg.params, pc,
                                        profile);
        for (std::size_t m = 0; m < traj.states.size(); ++m) {
            const bool last = m + 1 == traj.states.size();
            if (!last && cfg.cadence > 0 && m % static_cast<std::size_t>(cfg.cadence) != 0)
                continue;
            if (!last && cfg.cadence == 0 && m != 0)
                continue;
            series.records.push_back(record_state(traj.states[m], profile, ropts));
        }
        if (cfg.snapshot_stride > 0)
            for (std::size_t m = cfg.snapshot_stride; m < traj.states.size();
                 m += cfg.snapshot_stride) {
                char name[48];
                std::snprintf(name, sizeof name, "snapshot_%06zu.bin", m);
                write_snapshot(path(name), traj.states[m], cfg.params);
            }
        last_good = traj.states.back();
        std::ostringstream ps;
        ps << "picard_iterations = " << rep.iterations << "\n";
        ps << "picard_converged = " << (rep.converged ? "yes" : "no") << "\n";
        for (std::size_t i = 0; i < rep.diffs.size(); ++i)
            ps << "picard_diff_" << i + 1 << " = " << detail::format_full(rep.diffs[i])
               << "\n";
        if (rep.horizon_warning)
            ps << "picard_horizon_warning = T exceeds the advisory T0 estimate\n";
        picard_summary = ps.str();
    } else {
        // IMEX path: explicit loop so instability can persist the last good
        // state and the partial diagnostics
        MmpState y = initial;
        y.time = 0.0;
        series.records.push_back(record_state(y, profile, ropts));
        try {
            if (steps > 0) {
                const ModePropagator prop(grid, cfg.params, dt);
                std::optional<ModePropagator> tail;
                for (int s = 1; s <= steps; ++s) {
                    const bool last = (s == steps);
                    const double target = last ? cfg.t_final : s * dt;
                    const double step_dt = target - y.time;
                    if (last && std::abs(step_dt - dt) > 1e-12 * std::max(1.0, dt)) {
                        if (!tail)
                            tail.emplace(grid, cfg.params, step_dt);
                        y = imex_step(y, *tail);
                    } else {
                        y = imex_step(y, prop);
                    }
                    y.time = target;
                    last_good = y;
                    if (cfg.snapshot_stride > 0 && s % cfg.snapshot_stride == 0) {
                        char name[48];
                        std::snprintf(name, sizeof name, "snapshot_%06d.bin", s);
                        write_snapshot(path(name), y, cfg.params);
                    }
                    if (last || (cfg.cadence > 0 && s % cfg.cadence == 0))
                        series.records.push_back(record_state(y, profile, ropts));
                }
            }
        } catch (const Instability& e) {
            unstable = true;
            unstable_time = e.time;
        }
    }

    // delta(eps) over the final window, one value per configured epsilon
    std::vector<double> deltas(cfg.epsilons.size(), 0.0);
    if (!unstable)
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            try {
                const DeltaResult d = blowup_indicator(series, cfg.epsilons[i]);
                deltas[i] = d.delta;
                if (d.delta > cfg.delta_warn)
                    std::cerr << "warning: delta(" << cfg.epsilons[i] << ") = " << d.delta
                              << " exceeds the configured threshold (argmax block j = "
                              << d.argmax_j << ", range [" << d.j_min << "," << d.j_max
                              << "])\n";
            } catch (const WindowUnderflow&) {
                deltas[i] = 0.0; // window not covered (short run); reported as 0
            }
        }

    // diagnostics CSV: delta columns are populated on the final row only
    {
        std::ofstream csv(path("diagnostics.csv"));
        csv << detail::csv_header(cfg, profile) << "\n";
        const std::vector<double> zeros(cfg.epsilons.size(), 0.0);
        for (std::size_t i = 0; i < series.records.size(); ++i) {
            const bool last = i + 1 == series.records.size();
            csv << detail::csv_row(series.records[i], cfg, profile, last ? deltas : zeros)
                << "\n";
        }
    }

    // append run outcome to the manifest
    {
        std::ofstream man(path("manifest.txt"), std::ios::app);
        man << "\n# outcome\n";
        man << "status = " << (unstable ? "instability" : "completed") << "\n";
        if (unstable)
            man << "instability_time = " << detail::format_full(unstable_time) << "\n";
        if (!picard_summary.empty())
            man << picard_summary;
    }

    if (unstable) {
        write_snapshot(path("last_good.bin"), last_good, cfg.params);
        std::cerr << "instability at t = " << unstable_time
                  << "; last good state persisted\n";
        return 2;
    }
    write_snapshot(path("final.bin"), last_good, cfg.params);
    return 0;
}

} // namespace mmp
