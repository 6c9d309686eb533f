// verify.hpp: self-check suites behind the `verify` CLI subcommand. Each
// check reports the measured value against its tolerance; suites run at
// n = 8 and n = 16 (heavier cross-solver checks at one size).

#pragma once

#include "mmp/presets.hpp"
#include "mmp/run.hpp"

namespace mmp {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline void add_check(std::vector<CheckResult>& out, const std::string& name, double measured,
                      double tolerance) {
    out.push_back({name, measured, tolerance, measured <= tolerance});
}

inline MmpParams verify_params() {
    MmpParams p;
    p.mu = 0.8;
    p.chi = 0.3;
    p.kappa = 0.4;
    p.gamma = 1.0;
    p.nu = 0.7;
    return p;
}

inline double coeff_distance(const SpectralVectorField& a, const SpectralVectorField& b) {
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.coeffs[c].size(); ++i)
            worst = std::max(worst, std::abs(a.coeffs[c][i] - b.coeffs[c][i]));
    return worst;
}

} // namespace detail

inline std::vector<CheckResult> verify_spectral(int n) {
    std::vector<CheckResult> out;
    const std::string tag = "spectral/n" + std::to_string(n) + "/";
    const Grid g(n);
    Rng rng(2024);
    const SpectralVectorField f = random_band_limited(g, 1.0, n / 2, rng, false);

    out.push_back({tag + "hermitian_defect", hermitian_defect(f), 1e-12,
                   hermitian_defect(f) <= 1e-12});
    detail::add_check(out, tag + "round_trip",
                      detail::coeff_distance(forward_transform(inverse_transform(f)), f),
                      1e-12);
    {
        const double grid_side = grid_l2_norm(inverse_transform(f));
        const double mode_side = l2_norm(f);
        detail::add_check(out, tag + "parseval", std::abs(grid_side - mode_side),
                          1e-12 * mode_side);
    }
    {
        const SpectralVectorField pf = leray_project(f);
        detail::add_check(out, tag + "leray_idempotent",
                          detail::coeff_distance(leray_project(pf), pf), 1e-13);
        SpectralVectorField res = f;
        res -= pf;
        detail::add_check(out, tag + "leray_orthogonal", std::abs(inner_product(res, pf)),
                          1e-12);
        detail::add_check(out, tag + "leray_divergence", divergence_linf(pf), 1e-12);
    }
    {
        SpectralScalarField s(g);
        s.coeffs = f.coeffs[0];
        detail::add_check(out, tag + "curl_grad_zero", linf_coeff(curl(gradient(s))), 1e-12);
        double div_curl = 0.0;
        for (const auto& v : divergence(curl(f)).coeffs)
            div_curl = std::max(div_curl, std::abs(v));
        detail::add_check(out, tag + "div_curl_zero", div_curl, 1e-12);
        detail::add_check(out, tag + "lambda_compose",
                          detail::coeff_distance(lambda_s(lambda_s(f, 0.6), 0.9),
                                                 lambda_s(f, 1.5)),
                          1e-12);
    }
    return out;
}

inline std::vector<CheckResult> verify_lp(int n) {
    std::vector<CheckResult> out;
    const std::string tag = "lp/n" + std::to_string(n) + "/";
    const Grid g(n);
    const DyadicProfile p = build_profile(g);

    double worst_ball = 0.0, worst_annulus = 0.0, worst_bounds = 0.0;
    const int samples = 10000;
    for (int i = 1; i <= samples; ++i) {
        const double r = g.max_k() * i / samples;
        double ball = p.chi(r);
        double ann = 0.0;
        for (int j = -40; j <= p.j_max + 2; ++j) {
            if (j >= 0)
                ball += p.phi_j(j, r);
            ann += p.phi_j(j, r);
        }
        worst_ball = std::max(worst_ball, std::abs(ball - 1.0));
        worst_annulus = std::max(worst_annulus, std::abs(ann - 1.0));
        worst_bounds = std::max({worst_bounds, -p.phi(r), p.phi(r) - 1.0, -p.chi(r),
                                 p.chi(r) - 1.0});
    }
    detail::add_check(out, tag + "partition_ball", worst_ball, 1e-12);
    detail::add_check(out, tag + "partition_annulus", worst_annulus, 1e-12);
    detail::add_check(out, tag + "profile_bounds", worst_bounds, 0.0);

    Rng rng(2025);
    const SpectralVectorField f = random_band_limited(g, 1.0, n / 2, rng, false);
    const BlockDecomposition d = decompose(f, p);
    SpectralVectorField sum = d.lowpass;
    for (const auto& [j, blk] : d.blocks)
        sum += blk;
    sum -= f;
    detail::add_check(out, tag + "reconstruction", l2_norm(sum) / l2_norm(f), 1e-11);

    double ortho = 0.0;
    for (int j = p.j_min; j <= p.j_max; ++j)
        for (int jp = j + 2; jp <= p.j_max; ++jp)
            ortho = std::max(ortho, linf_coeff(delta_j(delta_j(f, jp, p), j, p)));
    detail::add_check(out, tag + "quasi_orthogonality", ortho, 0.0);

    // solenoidal one-annulus field: ||grad u||_2 equals ||curl u||_2
    Rng rng2(2026);
    SpectralVectorField u = random_band_limited(g, 1.0, n / 2, rng2, true);
    u = delta_j(u, 1, p);
    detail::add_check(out, tag + "curl_block_l2",
                      std::abs(std::sqrt(grad_l2_norm_sq(u)) - l2_norm(curl(u))), 1e-12);
    return out;
}

inline std::vector<CheckResult> verify_dynamics(int n) {
    std::vector<CheckResult> out;
    const std::string tag = "dynamics/n" + std::to_string(n) + "/";
    const Grid g(n);
    const MmpParams p = detail::verify_params();
    const MmpState s = make_random_seeded(g, {1.0, 0.7, 0.5}, 2027);

    detail::add_check(out, tag + "energy_balance", std::abs(energy_balance_residual(s, p)),
                      1e-10);
    detail::add_check(out, tag + "cross_term",
                      std::abs(inner_product(curl(s.omega), s.u) -
                               inner_product(curl(s.u), s.omega)),
                      1e-12);
    detail::add_check(out, tag + "magnetic_cancellation",
                      std::abs(inner_product(advect(s.b, s.b), s.u) +
                               inner_product(advect(s.b, s.u), s.b)),
                      1e-11);
    const Tendency t = rhs(s, p);
    detail::add_check(out, tag + "du_solenoidal", divergence_linf(t.du), 1e-10);
    detail::add_check(out, tag + "db_solenoidal", divergence_linf(t.db), 1e-10);

    const SpectralVectorField h = curl(s.u);
    const SpectralVectorField icap = curl(s.omega);
    const SpectralVectorField jcap = curl(s.b);
    const CurlTendency ct = curl_rhs(h, icap, jcap, s, p);
    const double commute = std::max({detail::coeff_distance(ct.dh, curl(t.du)),
                                     detail::coeff_distance(ct.di, curl(t.domega)),
                                     detail::coeff_distance(ct.dj, curl(t.db))});
    detail::add_check(out, tag + "curl_commutation", commute, 1e-10);

    MmpParams p2 = p;
    p2.kappa = 9.0;
    const CurlTendency ct2 = curl_rhs(h, icap, jcap, s, p2);
    detail::add_check(out, tag + "kappa_independence", detail::coeff_distance(ct.di, ct2.di),
                      0.0);
    return out;
}

inline std::vector<CheckResult> verify_picard(int n) {
    std::vector<CheckResult> out;
    const std::string tag = "picard/n" + std::to_string(n) + "/";
    const Grid g(n);
    const DyadicProfile prof = build_profile(g);
    const MmpParams p = detail::verify_params();
    const MmpState init = make_taylor_green(g, {0.2, 0.1, 0.1});

    PicardConfig cfg;
    cfg.t_final = 0.04;
    cfg.time_nodes = 20;
    cfg.cauchy_tol = 1e-12;
    const auto [traj, rep] = picard_solve(init.u, init.omega, init.b, p, cfg, prof);
    detail::add_check(out, tag + "converged", rep.converged ? 0.0 : 1.0, 0.0);
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i)
        worst_ratio = std::max(worst_ratio, rep.ratios[i]);
    detail::add_check(out, tag + "geometric_ratio", worst_ratio, 0.5);

    const double dt = cfg.t_final / cfg.time_nodes;
    IntegrateOptions opts;
    opts.trajectory_stride = 1;
    opts.monitor_cadence = 0;
    const auto [itraj, series] = imex_integrate(init, p, cfg.t_final, dt, prof, opts);
    double worst = 0.0;
    for (std::size_t m = 0; m < traj.states.size(); ++m) {
        MmpState d(g);
        d.u = traj.states[m].u;
        d.u -= itraj.states[m].u;
        d.omega = traj.states[m].omega;
        d.omega -= itraj.states[m].omega;
        d.b = traj.states[m].b;
        d.b -= itraj.states[m].b;
        worst = std::max(worst, state_sobolev_hs(d, cfg.s - 1.0));
    }
    detail::add_check(out, tag + "cross_solver", worst,
                      std::max(10.0 * dt * dt, 10.0 * cfg.cauchy_tol));
    return out;
}

inline std::vector<CheckResult> verify_monitors(int n) {
    std::vector<CheckResult> out;
    const std::string tag = "monitors/n" + std::to_string(n) + "/";
    const Grid g(n);
    const DyadicProfile prof = build_profile(g);
    const MmpParams p = detail::verify_params();

    // frozen series: delta(eps) = eps * sup exactly
    {
        DiagnosticsSeries series;
        series.params = p;
        series.grid_n = n;
        series.box_length = g.box_length();
        series.j_min = prof.j_min;
        series.j_max = prof.j_max;
        const MmpState s = make_taylor_green(g, {1.0, 0.4, 0.3});
        DiagnosticsRecord r = record_state(s, prof);
        for (int i = 0; i < 6; ++i) {
            r.time = 0.01 * i;
            series.records.push_back(r);
        }
        double sup = 0.0;
        for (const auto& [j, v] : r.block_sups)
            sup = std::max(sup, v);
        const auto d = blowup_indicator(series, 0.03);
        detail::add_check(out, tag + "frozen_delta", std::abs(d.delta - 0.03 * sup),
                          1e-14 * std::max(1.0, sup));
        const auto whole = bkm_integral(series, 0.0, 0.05);
        const auto part_a = bkm_integral(series, 0.0, 0.02);
        const auto part_b = bkm_integral(series, 0.02, 0.05);
        detail::add_check(out, tag + "bkm_additivity",
                          std::abs(whole.curl_u_integral - part_a.curl_u_integral -
                                   part_b.curl_u_integral),
                          1e-12);
    }

    // pure-diffusion ledger closure
    {
        MmpParams diff = p;
        diff.chi = 0.0;
        MmpState y0(g);
        detail::set_mode(y0.b, 1, 1, 0, {0.05, -0.05, 0.0});
        IntegrateOptions opts;
        opts.monitor_cadence = 1;
        auto [traj, series] = imex_integrate(y0, diff, 0.01, 1e-4, prof, opts);
        detail::add_check(out, tag + "diffusion_ledger",
                          std::abs(energy_ledger(series).worst_violation), 1e-10);
    }

    MmpParams unit;
    unit.mu = unit.gamma = unit.nu = 1.0;
    unit.chi = unit.kappa = 0.0;
    detail::add_check(out, tag + "cutoff_base",
                      std::abs(adaptive_cutoff_n(0.0, 0.0, 0.0, unit, 1.0) - 3.0), 0.0);
    return out;
}

inline std::vector<CheckResult> verify_suite(const std::string& suite) {
    std::vector<CheckResult> all;
    auto append = [&all](std::vector<CheckResult> v) {
        all.insert(all.end(), v.begin(), v.end());
    };
    const bool everything = suite == "all";
    if (everything || suite == "spectral") {
        append(verify_spectral(8));
        append(verify_spectral(16));
    }
    if (everything || suite == "lp") {
        append(verify_lp(8));
        append(verify_lp(16));
    }
    if (everything || suite == "dynamics") {
        append(verify_dynamics(8));
        append(verify_dynamics(16));
    }
    if (everything || suite == "picard") {
        append(verify_picard(8));
        append(verify_picard(16));
    }
    if (everything || suite == "monitors") {
        append(verify_monitors(8));
        append(verify_monitors(16));
    }
    if (all.empty())
        throw ValidationError("unknown verify suite '" + suite +
                              "' (spectral|lp|dynamics|picard|monitors|all)");
    return all;
}

} // namespace mmp
