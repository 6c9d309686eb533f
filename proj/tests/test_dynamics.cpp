// MMP dynamics: term isolation, the spectral convolution oracle, discrete
// energy identities, the curl system, parameter reductions.

#include <catch2/catch_amalgamated.hpp>

#include "mmp/dynamics.hpp"
#include "mmp/presets.hpp"
#include "oracles.hpp"

using namespace mmp;

namespace {

double max_coeff_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.coeffs[c].size(); ++i)
            worst = std::max(worst, std::abs(a.coeffs[c][i] - b.coeffs[c][i]));
    return worst;
}

MmpParams test_params() {
    MmpParams p;
    p.mu = 0.7;
    p.chi = 0.3;
    p.kappa = 0.4;
    p.gamma = 0.9;
    p.nu = 0.6;
    return p;
}

// (f.grad)g via the exact convolution sum:
// out_j(k) = i k_l sum_{p+q=k} g_j(p) f_l(q)
SpectralVectorField advect_by_convolution(const SpectralVectorField& f,
                                          const SpectralVectorField& g_field) {
    const Grid& g = f.grid;
    const SpectralVectorField fd = dealias(f);
    const SpectralVectorField gd = dealias(g_field);
    SpectralVectorField out(g);
    for (int j = 0; j < 3; ++j) {
        std::array<std::vector<cplx>, 3> conv;
        for (int l = 0; l < 3; ++l)
            conv[l] = oracle::convolve_exact(g, gd.coeffs[j], fd.coeffs[l]);
        detail::for_each_mode(g, [&](std::size_t i, const std::array<double, 3>& k) {
            out.coeffs[j][i] =
                cplx(0.0, 1.0) * (k[0] * conv[0][i] + k[1] * conv[1][i] + k[2] * conv[2][i]);
        });
    }
    detail::dealias_inplace(out);
    return out;
}

} // namespace

TEST_CASE("params validation") {
    MmpParams p = test_params();
    CHECK_NOTHROW(p.validate());
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = test_params();
    p.chi = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("rhs: rest state stays at rest") {
    const Grid g(8);
    const MmpState zero(g);
    const Tendency t = rhs(zero, test_params());
    CHECK(linf_coeff(t.du) == 0.0);
    CHECK(linf_coeff(t.domega) == 0.0);
    CHECK(linf_coeff(t.db) == 0.0);
}

TEST_CASE("rhs: pure magnetic stress isolation") {
    const Grid g(8);
    MmpState s(g);
    // u = omega = 0, b a single divergence-free mode
    detail::set_mode(s.b, 1, 0, 0, {0.0, 0.4, 0.0});
    const MmpParams p = test_params();
    const Tendency t = rhs(s, p);

    // du = Leray[(b.grad)b], domega = 0, db = nu lap b
    const SpectralVectorField stress = leray_project(advect_by_convolution(s.b, s.b));
    CHECK(max_coeff_diff(t.du, stress) < 1e-13);
    CHECK(linf_coeff(t.domega) == 0.0);
    SpectralVectorField expected_db = laplacian(s.b);
    expected_db *= p.nu;
    CHECK(max_coeff_diff(t.db, expected_db) < 1e-13);
}

TEST_CASE("rhs matches the direct convolution oracle on a random state") {
    const Grid g(8);
    const MmpState s = oracle::random_state(g, 211, 0.8);
    const MmpParams p = test_params();
    const Tendency t = rhs(s, p);

    // assemble the oracle tendency term by term
    SpectralVectorField du = advect_by_convolution(s.b, s.b);
    du -= advect_by_convolution(s.u, s.u);
    {
        SpectralVectorField c = curl(s.omega);
        c *= p.chi;
        du += c;
    }
    du = leray_project(du);
    {
        SpectralVectorField d = laplacian(s.u);
        d *= (p.mu + p.chi);
        du += d;
    }

    SpectralVectorField domega = advect_by_convolution(s.u, s.omega);
    domega *= -1.0;
    {
        SpectralVectorField d = laplacian(s.omega);
        d *= p.gamma;
        domega += d;
        SpectralScalarField divo = divergence(s.omega);
        SpectralVectorField gd = gradient(divo);
        gd *= p.kappa;
        domega += gd;
        SpectralVectorField damp = s.omega;
        damp *= -2.0 * p.chi;
        domega += damp;
        SpectralVectorField c = curl(s.u);
        c *= p.chi;
        domega += c;
    }

    SpectralVectorField db = advect_by_convolution(s.b, s.u);
    db -= advect_by_convolution(s.u, s.b);
    db = leray_project(db);
    {
        SpectralVectorField d = laplacian(s.b);
        d *= p.nu;
        db += d;
    }

    CHECK(max_coeff_diff(t.du, du) < 1e-11);
    CHECK(max_coeff_diff(t.domega, domega) < 1e-11);
    CHECK(max_coeff_diff(t.db, db) < 1e-11);
}

TEST_CASE("rhs: tendencies are solenoidal and grids must agree") {
    const Grid g(8);
    const MmpState s = oracle::random_state(g, 223, 1.2);
    const Tendency t = rhs(s, test_params());
    CHECK(divergence_linf(t.du) < 1e-10);
    CHECK(divergence_linf(t.db) < 1e-10);

    MmpState bad = s;
    bad.b = SpectralVectorField(Grid(16));
    CHECK_THROWS_AS(rhs(bad, test_params()), GridMismatch);
}

TEST_CASE("discrete energy identities") {
    const Grid g(8);
    const MmpParams p = test_params();

    SECTION("instantaneous balance closes on random states") {
        for (std::uint64_t seed : {301u, 302u, 303u}) {
            const MmpState s = oracle::random_state(g, seed, 1.0);
            CHECK(std::abs(energy_balance_residual(s, p)) < 1e-10);
        }
    }
    SECTION("cross-term symmetry <curl omega, u> = <curl u, omega>") {
        const MmpState s = oracle::random_state(g, 307, 1.0);
        const double a = inner_product(curl(s.omega), s.u);
        const double b = inner_product(curl(s.u), s.omega);
        CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
    SECTION("magnetic advection cancellation") {
        const MmpState s = oracle::random_state(g, 311, 1.0);
        const double a = inner_product(advect(s.b, s.b), s.u);
        const double b = inner_product(advect(s.b, s.u), s.b);
        CHECK(std::abs(a + b) < 1e-11);
    }
}

TEST_CASE("curl system consistency") {
    const Grid g(8);
    const MmpParams p = test_params();
    const MmpState s = oracle::random_state(g, 401, 0.9);
    const SpectralVectorField h = curl(s.u);
    const SpectralVectorField icap = curl(s.omega);
    const SpectralVectorField jcap = curl(s.b);

    SECTION("zero state gives zero curl tendencies") {
        const MmpState zero(g);
        SpectralVectorField zf(g);
        const CurlTendency t = curl_rhs(zf, zf, zf, zero, p);
        CHECK(linf_coeff(t.dh) == 0.0);
        CHECK(linf_coeff(t.di) == 0.0);
        CHECK(linf_coeff(t.dj) == 0.0);
    }

    SECTION("curl_rhs commutes with curl of rhs") {
        const CurlTendency t = curl_rhs(h, icap, jcap, s, p);
        const Tendency full = rhs(s, p);
        CHECK(max_coeff_diff(t.dh, curl(full.du)) < 1e-10);
        CHECK(max_coeff_diff(t.di, curl(full.domega)) < 1e-10);
        CHECK(max_coeff_diff(t.dj, curl(full.db)) < 1e-10);
    }

    SECTION("dI is independent of kappa") {
        MmpParams p2 = p;
        p2.kappa = 7.3;
        const CurlTendency a = curl_rhs(h, icap, jcap, s, p);
        const CurlTendency b = curl_rhs(h, icap, jcap, s, p2);
        CHECK(max_coeff_diff(a.di, b.di) == 0.0);
    }

    SECTION("inconsistent inputs are rejected") {
        SpectralVectorField wrong = h;
        wrong *= 1.5;
        CHECK_THROWS_AS(curl_rhs(wrong, icap, jcap, s, p), ConsistencyViolation);
    }
}

TEST_CASE("reductions define invariant subspaces") {
    const Grid g(8);

    SECTION("micropolar: b stays identically zero") {
        const Reduction r = reduce_mode(test_params(), ReducedModel::micropolar);
        CHECK(r.b_must_vanish);
        MmpState s = oracle::random_state(g, 501, 0.5);
        s.b = SpectralVectorField(g);
        const Tendency t = rhs(s, r.params);
        CHECK(linf_coeff(t.db) == 0.0);
    }
    SECTION("mhd: omega stays identically zero when chi = 0") {
        const Reduction r = reduce_mode(test_params(), ReducedModel::mhd);
        CHECK(r.params.chi == 0.0);
        CHECK(r.omega_must_vanish);
        MmpState s = oracle::random_state(g, 503, 0.5);
        s.omega = SpectralVectorField(g);
        const Tendency t = rhs(s, r.params);
        CHECK(linf_coeff(t.domega) == 0.0);
    }
    SECTION("navier_stokes: both omega and b stay zero") {
        const Reduction r = reduce_mode(test_params(), ReducedModel::navier_stokes);
        MmpState s = oracle::random_state(g, 505, 0.5);
        s.omega = SpectralVectorField(g);
        s.b = SpectralVectorField(g);
        const Tendency t = rhs(s, r.params);
        CHECK(linf_coeff(t.domega) == 0.0);
        CHECK(linf_coeff(t.db) == 0.0);
    }
}
