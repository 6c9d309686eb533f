// Regularity monitors: energy ledger, blow-up indicator delta, criterion
// integrals, adaptive cutoff N, window sup.

#include <catch2/catch_amalgamated.hpp>

#include "mmp/presets.hpp"
#include "mmp/time_integration.hpp"
#include "oracles.hpp"

using namespace mmp;

namespace {

MmpParams test_params() {
    MmpParams p;
    p.mu = 0.7;
    p.chi = 0.3;
    p.kappa = 0.4;
    p.gamma = 0.9;
    p.nu = 0.6;
    return p;
}

// short decaying Taylor-Green run with dense records
DiagnosticsSeries decaying_series(int n, double t_final, double dt) {
    const Grid g(n);
    const DyadicProfile prof = build_profile(g);
    const MmpState y0 = make_taylor_green(g, {1.0, 0.5, 0.4});
    IntegrateOptions opts;
    opts.monitor_cadence = 1;
    opts.record.lp_list = {2.0};
    auto [traj, series] = imex_integrate(y0, test_params(), t_final, dt, prof, opts);
    return series;
}

// constant-in-time artificial series built from one state
DiagnosticsSeries frozen_series(const MmpState& s, const DyadicProfile& prof, int n_records,
                                double spacing) {
    DiagnosticsSeries out;
    out.params = test_params();
    out.grid_n = s.grid().n();
    out.box_length = s.grid().box_length();
    out.j_min = prof.j_min;
    out.j_max = prof.j_max;
    RecordOptions ropts;
    ropts.lp_list = {2.0};
    DiagnosticsRecord r = record_state(s, prof, ropts);
    for (int i = 0; i < n_records; ++i) {
        r.time = i * spacing;
        out.records.push_back(r);
    }
    return out;
}

DiagnosticsSeries zero_series(int n_records = 6, double spacing = 0.01) {
    const Grid g(8);
    const DyadicProfile prof = build_profile(g);
    return frozen_series(MmpState(g), prof, n_records, spacing);
}

} // namespace

TEST_CASE("energy_ledger: trivial, exact diffusion, data requirements") {
    SECTION("zero trajectory satisfies the identity with zero slack") {
        const auto rep = energy_ledger(zero_series());
        CHECK(rep.worst_violation == 0.0);
        CHECK(rep.ok);
    }
    SECTION("single-mode pure diffusion closes to 1e-10") {
        const Grid g(8);
        const DyadicProfile prof = build_profile(g);
        MmpParams p = test_params();
        p.chi = 0.0; // no spin coupling: energy balance is an equality
        MmpState y0(g);
        detail::set_mode(y0.b, 1, 1, 0, {0.05, -0.05, 0.0});
        detail::set_mode(y0.u, 0, 1, 1, {0.05, 0.0, 0.0});
        IntegrateOptions opts;
        opts.monitor_cadence = 1;
        auto [traj, series] = imex_integrate(y0, p, 0.01, 1e-4, prof, opts);
        const auto rep = energy_ledger(series);
        CHECK(std::abs(rep.worst_violation) < 1e-10);
    }
    SECTION("a single record is insufficient") {
        auto s = zero_series(1);
        CHECK_THROWS_AS(energy_ledger(s), InsufficientData);
    }
}

TEST_CASE("energy_ledger violation shrinks ~ dt^2 on a Taylor-Green run") {
    // chi = 0 makes the continuum inequality an equality, so the recorded
    // violation is pure time-discretization error
    const Grid g(16);
    const DyadicProfile prof = build_profile(g);
    MmpParams p = test_params();
    p.chi = 0.0;
    const MmpState y0 = make_taylor_green(g, {1.0, 0.5, 0.4});
    auto violation_at = [&](double dt) {
        IntegrateOptions opts;
        opts.monitor_cadence = 1;
        auto [traj, series] = imex_integrate(y0, p, 0.1, dt, prof, opts);
        return std::abs(energy_ledger(series).worst_violation);
    };
    const double v1 = violation_at(4e-3);
    const double v2 = violation_at(2e-3);
    const double order = std::log2(v1 / v2);
    INFO("ledger violation order " << order << " (" << v1 << " -> " << v2 << ")");
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("blowup_indicator: frozen series, monotonicity, sup decomposition") {
    const Grid g(16);
    const DyadicProfile prof = build_profile(g);

    SECTION("zero trajectory gives delta = 0") {
        const auto d = blowup_indicator(zero_series(), 0.03);
        CHECK(d.delta == 0.0);
    }
    SECTION("constant-in-time series integrates exactly") {
        const MmpState s = make_taylor_green(g, {1.2, 0.3, 0.2});
        const DiagnosticsSeries series = frozen_series(s, prof, 11, 0.01);
        const DiagnosticsRecord& r = series.records.back();
        // the maximizing block of the frozen integrand
        int jstar = prof.j_min;
        double sup = 0.0;
        for (const auto& [j, v] : r.block_sups)
            if (v > sup) {
                sup = v;
                jstar = j;
            }
        for (double eps : {0.005, 0.02, 0.05}) {
            const auto d = blowup_indicator(series, eps);
            CHECK(d.argmax_j == jstar);
            CHECK(std::abs(d.delta - eps * sup) < 1e-14 * std::max(1.0, sup));
        }
        // truncation range is reported
        const auto d = blowup_indicator(series, 0.02);
        CHECK(d.j_min == prof.j_min);
        CHECK(d.j_max == prof.j_max);
    }
    SECTION("delta is nondecreasing in epsilon on a real run") {
        const DiagnosticsSeries series = decaying_series(16, 0.05, 1e-3);
        double prev = 0.0;
        for (double eps : {0.005, 0.01, 0.02, 0.03, 0.045}) {
            const double d = blowup_indicator(series, eps).delta;
            CHECK(d >= prev - 1e-15);
            prev = d;
        }
    }
    SECTION("splitting the block range and taking the max reproduces delta") {
        const DiagnosticsSeries series = decaying_series(16, 0.03, 1e-3);
        const double eps = 0.02;
        const auto full = blowup_indicator(series, eps);
        DiagnosticsSeries lower = series, upper = series;
        const int mid = (series.j_min + series.j_max) / 2;
        lower.j_max = mid;
        upper.j_min = mid + 1;
        const double split_max =
            std::max(blowup_indicator(lower, eps).delta, blowup_indicator(upper, eps).delta);
        CHECK(std::abs(full.delta - split_max) < 1e-15);
    }
    SECTION("epsilon outside the covered span underflows") {
        const auto s = zero_series(4, 0.01);
        CHECK_THROWS_AS(blowup_indicator(s, 1.0), WindowUnderflow);
        CHECK_THROWS_AS(blowup_indicator(s, -0.1), WindowUnderflow);
    }
}

TEST_CASE("blowup_indicator: delta(eps)/eps approaches the endpoint block sup") {
    const DiagnosticsSeries series = decaying_series(16, 0.05, 1e-3);
    const auto d0 = blowup_indicator(series, 0.004);
    const int jstar = d0.argmax_j;
    const double endpoint = series.records.back().block_sups.at(jstar);
    // linear Richardson extrapolation of delta(eps)/eps at eps, eps/2
    const double g1 = blowup_indicator(series, 0.008).delta / 0.008;
    const double g2 = blowup_indicator(series, 0.004).delta / 0.004;
    const double extrap = 2.0 * g2 - g1;
    CHECK(std::abs(extrap - endpoint) < 0.02 * endpoint);
}

TEST_CASE("bkm_integral: constants, quadrature robustness, additivity") {
    const Grid g(16);
    const DyadicProfile prof = build_profile(g);

    SECTION("zero trajectory integrates to zero") {
        const auto r = bkm_integral(zero_series(), 0.0, 0.05);
        CHECK(r.curl_u_integral == 0.0);
        CHECK(r.curl_b_integral == 0.0);
    }
    SECTION("constant integrand integrates to span times value") {
        const MmpState s = make_taylor_green(g, {0.9, 0.2, 0.5});
        const DiagnosticsSeries series = frozen_series(s, prof, 6, 0.01);
        const auto r = bkm_integral(series, 0.01, 0.04);
        CHECK(std::abs(r.curl_u_integral - 0.03 * series.records[0].curl_u_sup) < 1e-14);
        CHECK(std::abs(r.curl_b_integral - 0.03 * series.records[0].curl_b_sup) < 1e-14);
    }
    SECTION("agrees with a Simpson-rule recomputation within 1%") {
        const DiagnosticsSeries series = decaying_series(16, 0.04, 1e-3);
        const auto r = bkm_integral(series, 0.0, 0.04);
        // Simpson over the (even) record count
        const auto& rec = series.records;
        double simpson = 0.0;
        for (std::size_t i = 0; i + 2 < rec.size(); i += 2) {
            const double h = rec[i + 1].time - rec[i].time;
            simpson += h / 3.0 *
                       (rec[i].curl_u_sup + 4.0 * rec[i + 1].curl_u_sup + rec[i + 2].curl_u_sup);
        }
        CHECK(std::abs(r.curl_u_integral - simpson) < 0.01 * simpson);
    }
    SECTION("windows are additive at aligned nodes") {
        const DiagnosticsSeries series = decaying_series(16, 0.04, 2e-3);
        const auto whole = bkm_integral(series, 0.0, 0.04);
        const auto a = bkm_integral(series, 0.0, 0.016);
        const auto b = bkm_integral(series, 0.016, 0.04);
        CHECK(std::abs(whole.curl_u_integral - a.curl_u_integral - b.curl_u_integral) < 1e-12);
    }
    SECTION("window outside the span underflows") {
        CHECK_THROWS_AS(bkm_integral(zero_series(4, 0.01), -0.01, 0.02), WindowUnderflow);
        CHECK_THROWS_AS(bkm_integral(zero_series(4, 0.01), 0.0, 0.2), WindowUnderflow);
    }
}

TEST_CASE("zhou_integral: exponent pairing, scaling, errors") {
    const Grid g(16);
    const DyadicProfile prof = build_profile(g);

    SECTION("zero trajectory integrates to zero") {
        CHECK(zhou_integral(zero_series(), 2.0, 0.0, 0.05) == 0.0);
    }
    SECTION("p = 2 gives q = 4 and matches the direct recomputation") {
        const DiagnosticsSeries series = decaying_series(16, 0.02, 1e-3);
        const double z = zhou_integral(series, 2.0, 0.0, 0.02);
        // trapezoid of ||grad u||_2^4 straight off the records
        const auto& rec = series.records;
        double direct = 0.0;
        for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
            const double a = std::pow(rec[i].grad_u_lp.at(2.0), 4.0);
            const double b = std::pow(rec[i + 1].grad_u_lp.at(2.0), 4.0);
            direct += 0.5 * (rec[i + 1].time - rec[i].time) * (a + b);
        }
        CHECK(std::abs(z - direct) < 1e-12 * std::max(1.0, direct));
        CHECK(z > 0.0);
    }
    SECTION("integrand scales as amplitude^4 at p = 2") {
        const MmpState s1 = make_taylor_green(g, {0.5, 0.0, 0.0});
        MmpState s2 = s1;
        s2.u *= 2.0;
        const DiagnosticsSeries f1 = frozen_series(s1, prof, 5, 0.01);
        const DiagnosticsSeries f2 = frozen_series(s2, prof, 5, 0.01);
        const double z1 = zhou_integral(f1, 2.0, 0.0, 0.04);
        const double z2 = zhou_integral(f2, 2.0, 0.0, 0.04);
        CHECK(std::abs(z2 / z1 - 16.0) < 1e-10);
    }
    SECTION("p at or below 3/2 is rejected") {
        CHECK_THROWS_AS(zhou_integral(zero_series(), 1.5, 0.0, 0.05), ExponentOutOfRange);
        CHECK_THROWS_AS(zhou_integral(zero_series(), 1.2, 0.0, 0.05), ExponentOutOfRange);
    }
    SECTION("missing exponent in the records is reported") {
        CHECK_THROWS_AS(zhou_integral(zero_series(), 3.0, 0.0, 0.05), InsufficientData);
    }
}

TEST_CASE("adaptive_cutoff_n: base case, monotonicity, asymptotic slope") {
    MmpParams p;
    p.mu = p.gamma = p.nu = 1.0;
    p.chi = p.kappa = 0.0;

    // log+(0) = log(e) = 1: floor(2/log 2) ... = floor(2.885) + 1 = 3
    CHECK(adaptive_cutoff_n(0.0, 0.0, 0.0, p, 1.0) == 3);

    SECTION("nondecreasing in each curl norm, nonincreasing in the viscosity floor") {
        int prev = 0;
        for (double h : {0.0, 0.5, 1.0, 4.0, 16.0, 100.0}) {
            const int n = adaptive_cutoff_n(h, 0.2, 0.1, p, 1.0);
            CHECK(n >= prev);
            prev = n;
        }
        MmpParams small = p;
        small.mu = 0.01;
        CHECK(adaptive_cutoff_n(1.0, 1.0, 1.0, small, 1.0) >=
              adaptive_cutoff_n(1.0, 1.0, 1.0, p, 1.0));
    }
    SECTION("doubling large norms adds ~2 to N") {
        const double base = 1e6;
        for (int k = 1; k <= 4; ++k) {
            const int n0 = adaptive_cutoff_n(base, 0.0, 0.0, p, 1.0);
            const int nk = adaptive_cutoff_n(std::ldexp(base, 2 * k), 0.0, 0.0, p, 1.0);
            CHECK(std::abs(nk - n0 - 4 * k) <= 1); // slope 2 per doubling
        }
    }
}

TEST_CASE("zeta_sup: trivial, monotone, brute-force scan") {
    const Grid g(16);
    const DyadicProfile prof = build_profile(g);

    CHECK(zeta_sup(zero_series(), 0.0, 0.05) == 0.0);

    const DiagnosticsSeries series = decaying_series(16, 0.03, 1e-3);
    // decaying run: the sup sits at the window's left edge
    const double z = zeta_sup(series, 0.0, 0.03);
    const auto& first = series.records.front();
    CHECK(std::abs(z - (first.curl_l2[0] + first.curl_l2[1] + first.curl_l2[2])) < 1e-14);

    // equals a direct scan on any window
    double manual = 0.0;
    for (const auto& r : series.records)
        if (r.time >= 0.01 && r.time <= 0.025)
            manual = std::max(manual, r.curl_l2[0] + r.curl_l2[1] + r.curl_l2[2]);
    CHECK(zeta_sup(series, 0.01, 0.025) == manual);

    CHECK_THROWS_AS(zeta_sup(series, 0.2, 0.4), WindowUnderflow);
}

TEST_CASE("grid identity: ||grad u|| = ||curl u|| for solenoidal fields") {
    const Grid g(16);
    const SpectralVectorField u = oracle::random_field(g, 811, 1.0, 5, true);
    const double grad_norm = std::sqrt(grad_l2_norm_sq(u));
    const double curl_norm = l2_norm(curl(u));
    CHECK(std::abs(grad_norm - curl_norm) < 1e-12 * std::max(1.0, grad_norm));
}
