// mmp: periodic-box pseudo-spectral solver for the incompressible
// magneto-micropolar system with Littlewood-Paley regularity monitors.
//
// Subcommands:
//   run <config>       integrate a configured run, write diagnostics
//   verify <suite>     run the module invariant suites (spectral|lp|
//                      dynamics|picard|monitors|all)
//   inspect <snapshot> print a snapshot header and field norms
//
// Exit codes: 0 success, 1 usage/config error, 2 instability,
// 3 verification failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "mmp/run.hpp"
#include "mmp/verify.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& output_override) {
    mmp::RunConfig cfg = mmp::parse_config(config_path);
    if (!output_override.empty())
        cfg.output_dir = output_override;
    return mmp::run(cfg);
}

int do_verify(const std::string& suite) {
    const auto results = mmp::verify_suite(suite);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%-42s measured=%-13.6g tol=%-10.4g %s\n", r.name.c_str(), r.measured,
                    r.tolerance, r.pass ? "PASS" : "FAIL");
        if (!r.pass)
            ++failures;
    }
    if (failures) {
        std::printf("%d of %zu checks failed\n", failures, results.size());
        return 3;
    }
    std::printf("all checks passed (%zu)\n", results.size());
    return 0;
}

int do_inspect(const std::string& snapshot_path) {
    const mmp::SnapshotData snap = mmp::read_snapshot(snapshot_path);
    const mmp::MmpState& s = snap.state;
    std::printf("format version : %u\n", snap.version);
    std::printf("grid n         : %d\n", s.grid().n());
    std::printf("time           : %.17g\n", s.time);
    std::printf("mu, chi, kappa : %.17g  %.17g  %.17g\n", snap.params.mu, snap.params.chi,
                snap.params.kappa);
    std::printf("gamma, nu      : %.17g  %.17g\n", snap.params.gamma, snap.params.nu);
    std::printf("||u||_2        : %.17g\n", mmp::l2_norm(s.u));
    std::printf("||omega||_2    : %.17g\n", mmp::l2_norm(s.omega));
    std::printf("||b||_2        : %.17g\n", mmp::l2_norm(s.b));
    std::printf("max |k.u|      : %.6g\n", mmp::divergence_linf(s.u));
    std::printf("max |k.b|      : %.6g\n", mmp::divergence_linf(s.b));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral magneto-micropolar solver and spectral-analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path, suite, snapshot_path, output_override;

    CLI::App* cmd_run = app.add_subcommand("run", "integrate a configured run");
    cmd_run->add_option("config", config_path, "path to the run configuration")->required();
    cmd_run->add_option("--output-dir", output_override,
                        "override [output] dir (the MMP_OUTPUT_DIR environment variable "
                        "takes precedence)");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run module invariant suites");
    cmd_verify->add_option("suite", suite, "spectral|lp|dynamics|picard|monitors|all")
        ->required();

    CLI::App* cmd_inspect = app.add_subcommand("inspect", "print snapshot header and norms");
    cmd_inspect->add_option("snapshot", snapshot_path, "path to a snapshot file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_run->parsed())
            return do_run(config_path, output_override);
        if (cmd_verify->parsed())
            return do_verify(suite);
        if (cmd_inspect->parsed())
            return do_inspect(snapshot_path);
    } catch (const mmp::Instability& e) {
        std::cerr << "error: " << e.what() << " (t = " << e.time << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
