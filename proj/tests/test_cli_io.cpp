// CLI and persistence: config parsing and round trips, snapshot format,
// CSV schema, run determinism, exit codes of the installed binary.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mmp/config.hpp"
#include "mmp/run.hpp"
#include "mmp/snapshot.hpp"
#include "oracles.hpp"

using namespace mmp;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"(
[grid]
n = 16

[params]
mu = 1.0
chi = 0.1
kappa = 0.1
gamma = 1.0
nu = 1.0

[initial]
preset = taylor_green

[solver]
type = imex
T = 0.1
dt = 1e-3
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "mmp_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MMP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("parse_config: defaults, invariants, strictness") {
    SECTION("minimal config fills the documented defaults") {
        const RunConfig cfg = parse_config_text(kMinimalConfig);
        CHECK(cfg.n == 16);
        CHECK(cfg.preset == Preset::taylor_green);
        CHECK(cfg.solver == SolverKind::imex);
        CHECK(cfg.t_final == 0.1);
        CHECK(cfg.dt == 1e-3);
        CHECK(cfg.s == 2.0);        // default
        CHECK(cfg.cadence == 10);   // default
        CHECK(cfg.output_dir == "out");
        CHECK(cfg.epsilons.size() == 3);
    }
    SECTION("violated positivity is a ValidationError naming the field") {
        std::string bad = kMinimalConfig;
        const auto pos = bad.find("mu = 1.0");
        bad.replace(pos, 8, "mu = 0.0");
        try {
            parse_config_text(bad);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("mu must be positive") != std::string::npos);
        }
    }
    SECTION("unknown keys and sections are rejected with line numbers") {
        CHECK_THROWS_AS(parse_config_text(std::string(kMinimalConfig) + "\nbogus = 1\n"),
                        ParseError);
        CHECK_THROWS_AS(parse_config_text(std::string(kMinimalConfig) + "\n[plotting]\n"),
                        ParseError);
        try {
            parse_config_text(std::string(kMinimalConfig) + "typo_key = 3\n");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
        }
    }
    SECTION("dt and time_nodes are mutually exclusive") {
        CHECK_THROWS_AS(
            parse_config_text(std::string(kMinimalConfig) + "time_nodes = 10\n"),
            ValidationError);
    }
    SECTION("config round trip reparses identically") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.lp_list = {2.0, 3.0};
        cfg.seed = 77;
        const std::string text = serialize_config(cfg);
        const RunConfig again = parse_config_text(text);
        CHECK(serialize_config(again) == text);
    }
}

TEST_CASE("snapshot: bit-exact round trip and corruption detection") {
    const Grid g(8);
    const MmpState s = oracle::random_state(g, 901, 1.3);
    MmpParams p;
    p.mu = 0.123456789012345;
    p.chi = 1e-7;
    p.kappa = 3.25;
    p.gamma = 2.0;
    p.nu = 0.5;
    const fs::path dir = fresh_dir("snapshot");
    const fs::path file = dir / "state.bin";

    write_snapshot(file.string(), s, p);
    const SnapshotData back = read_snapshot(file.string());
    CHECK(back.version == kSnapshotVersion);
    CHECK(back.params.mu == p.mu);
    CHECK(back.params.nu == p.nu);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < g.size(); ++i) {
            REQUIRE(back.state.u.coeffs[c][i] == s.u.coeffs[c][i]);
            REQUIRE(back.state.omega.coeffs[c][i] == s.omega.coeffs[c][i]);
            REQUIRE(back.state.b.coeffs[c][i] == s.b.coeffs[c][i]);
        }

    // writing the reread state reproduces the file byte for byte
    const fs::path file2 = dir / "state2.bin";
    write_snapshot(file2.string(), back.state, back.params);
    CHECK(slurp(file) == slurp(file2));

    SECTION("bad magic is a hard parse error") {
        std::string bytes = slurp(file);
        bytes[0] = 'X';
        std::ofstream(dir / "bad.bin", std::ios::binary) << bytes;
        CHECK_THROWS_AS(read_snapshot((dir / "bad.bin").string()), ParseError);
    }
    SECTION("truncation is a hard parse error") {
        std::string bytes = slurp(file);
        bytes.resize(bytes.size() / 2);
        std::ofstream(dir / "trunc.bin", std::ios::binary) << bytes;
        CHECK_THROWS_AS(read_snapshot((dir / "trunc.bin").string()), ParseError);
    }
}

TEST_CASE("run: artifacts, schema, reductions, determinism") {
    SECTION("T = 0 writes exactly one record and exits 0") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.t_final = 0.0;
        cfg.dt = 0.0;
        const fs::path dir = fresh_dir("t0");
        cfg.output_dir = dir.string();
        CHECK(mmp::run(cfg) == 0);
        const std::string csv = slurp(dir / "diagnostics.csv");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2); // header + one record
        CHECK(fs::exists(dir / "final.bin"));
        CHECK(fs::exists(dir / "manifest.txt"));
    }
    SECTION("micropolar preset run keeps the E_b column identically zero") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.amp_b = 0.0;
        cfg.t_final = 0.02;
        cfg.cadence = 5;
        const fs::path dir = fresh_dir("micropolar");
        cfg.output_dir = dir.string();
        REQUIRE(mmp::run(cfg) == 0);
        std::ifstream csv(dir / "diagnostics.csv");
        std::string line;
        std::getline(csv, line); // header
        const auto col = [&line]() {
            // E_b is the 4th column
            std::stringstream ss(line);
            std::string item;
            for (int i = 0; i < 4; ++i)
                std::getline(ss, item, ',');
            return item;
        };
        int rows = 0;
        while (std::getline(csv, line)) {
            ++rows;
            CHECK(std::stod(col()) == 0.0);
        }
        CHECK(rows >= 2);
    }
    SECTION("identical seeded configs produce byte-identical outputs") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.preset = Preset::random_seeded;
        cfg.seed = 424242;
        cfg.t_final = 0.02;
        cfg.amp_u = 0.4;
        cfg.amp_omega = 0.2;
        cfg.amp_b = 0.2;
        const fs::path dir1 = fresh_dir("det1");
        const fs::path dir2 = fresh_dir("det2");
        cfg.output_dir = dir1.string();
        REQUIRE(mmp::run(cfg) == 0);
        cfg.output_dir = dir2.string();
        REQUIRE(mmp::run(cfg) == 0);
        CHECK(slurp(dir1 / "diagnostics.csv") == slurp(dir2 / "diagnostics.csv"));
        CHECK(slurp(dir1 / "final.bin") == slurp(dir2 / "final.bin"));
        // manifests differ only in the echoed output dir; compare the rest
        std::string m1 = slurp(dir1 / "manifest.txt");
        std::string m2 = slurp(dir2 / "manifest.txt");
        const std::string d1 = "dir = " + dir1.string();
        const std::string d2 = "dir = " + dir2.string();
        m1.replace(m1.find(d1), d1.size(), "dir = X");
        m2.replace(m2.find(d2), d2.size(), "dir = X");
        CHECK(m1 == m2);
    }
    SECTION("CSV schema: fixed header, constant column count") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.t_final = 0.01;
        cfg.cadence = 2;
        const fs::path dir = fresh_dir("schema");
        cfg.output_dir = dir.string();
        REQUIRE(mmp::run(cfg) == 0);
        std::ifstream csv(dir / "diagnostics.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header.rfind("time,E_u,E_omega,E_b,", 0) == 0);
        const auto cols = std::count(header.begin(), header.end(), ',');
        std::string line;
        while (std::getline(csv, line))
            CHECK(std::count(line.begin(), line.end(), ',') == cols);
    }
    SECTION("snapshot stride emits re-ingestible states") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.t_final = 0.01;
        cfg.snapshot_stride = 5;
        const fs::path dir = fresh_dir("stride");
        cfg.output_dir = dir.string();
        REQUIRE(mmp::run(cfg) == 0);
        REQUIRE(fs::exists(dir / "snapshot_000005.bin"));
        const SnapshotData snap = read_snapshot((dir / "snapshot_000005.bin").string());
        CHECK(snap.state.time == 0.005);
    }
}

TEST_CASE("cli binary: exit codes and inspect output") {
    const fs::path dir = fresh_dir("cli");

    SECTION("usage errors exit 1") {
        CHECK(run_cli("") == 1);
        CHECK(run_cli("run /nonexistent.cfg") == 1);
        CHECK(run_cli("verify bogus_suite") == 1);
        CHECK(run_cli("inspect /nonexistent.bin") == 1);
    }
    SECTION("verify spectral exits 0") {
        CHECK(run_cli("verify spectral") == 0);
    }
    SECTION("run then inspect the final snapshot") {
        std::ofstream(dir / "run.cfg") << kMinimalConfig;
        const std::string out = (dir / "out").string();
        CHECK(run_cli("run " + (dir / "run.cfg").string() + " --output-dir " + out) == 0);

        const std::string cmd = std::string(MMP_CLI_PATH) + " inspect " + out +
                                "/final.bin > " + (dir / "inspect.txt").string();
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        const std::string text = slurp(dir / "inspect.txt");
        CHECK(text.find("grid n         : 16") != std::string::npos);
        CHECK(text.find("||u||_2") != std::string::npos);
    }
    SECTION("instability exits 2 and persists the last good state") {
        RunConfig cfg = parse_config_text(kMinimalConfig);
        cfg.amp_u = 1e11;
        cfg.t_final = 1.0;
        cfg.dt = 0.5;
        const fs::path odir = fresh_dir("unstable");
        cfg.output_dir = odir.string();
        std::ofstream(dir / "unstable.cfg") << serialize_config(cfg);
        CHECK(run_cli("run " + (dir / "unstable.cfg").string()) == 2);
        CHECK(fs::exists(odir / "last_good.bin"));
        const std::string manifest = slurp(odir / "manifest.txt");
        CHECK(manifest.find("status = instability") != std::string::npos);
        CHECK(manifest.find("instability_time =") != std::string::npos);
    }
}

TEST_CASE("MMP_OUTPUT_DIR overrides the configured output directory") {
    RunConfig cfg = parse_config_text(kMinimalConfig);
    cfg.t_final = 0.0;
    cfg.dt = 0.0;
    const fs::path dir = fresh_dir("envdir");
    cfg.output_dir = (dir / "ignored").string();
    setenv("MMP_OUTPUT_DIR", (dir / "actual").string().c_str(), 1);
    REQUIRE(mmp::run(cfg) == 0);
    unsetenv("MMP_OUTPUT_DIR");
    CHECK(fs::exists(dir / "actual" / "diagnostics.csv"));
    CHECK(!fs::exists(dir / "ignored"));
}
