// littlewood_paley.hpp: dyadic partition of unity, block projections Delta_j
// and S_j, Besov/Sobolev norms, and the Bernstein scaling check.
//
// The profile is built from the C-infinity transition
//     theta(t) = exp(-1/t) (t > 0),  rise(t) = theta(t) / (theta(t) + theta(1-t)),
// with chi(r) = 1 - rise(4r - 3), so chi == 1 for r <= 3/4 and chi == 0 for
// r >= 1, and phi(r) = chi(r/2) - chi(r). Then phi is supported in [3/4, 2]
// (inside the annulus [3/4, 8/3]), rises on [3/4, 1], falls on [3/2, 2], and
// the dyadic sums telescope exactly:
//     chi(r) + sum_{j=0..J} phi(2^-j r) = chi(2^-(J+1) r),
// identically 1 once 2^-(J+1) r <= 3/4. Block j_max is the smallest block
// closing that identity at the lattice corner, so lowpass-plus-blocks
// reconstruction is exact for arbitrary fields.

#pragma once

#include <map>
#include <type_traits>
#include <vector>

#include "mmp/fft.hpp"
#include "mmp/operators.hpp"
#include "mmp/rng.hpp"

namespace mmp {

struct DyadicProfile {
    Grid grid;
    int j_min = 0;
    int j_max = 0;

    static double rise(double t) {
        if (t <= 0.0)
            return 0.0;
        if (t >= 1.0)
            return 1.0;
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        return a / (a + b);
    }

    // low-pass bump: 1 on |xi| <= 3/4, 0 on |xi| >= 1
    double chi(double r) const { return 1.0 - rise(4.0 * r - 3.0); }

    // annular bump: supported in [3/4, 2], phi(xi) + phi(xi/2) = 1 on overlap
    double phi(double r) const { return chi(0.5 * r) - chi(r); }

    double phi_j(int j, double r) const { return phi(std::ldexp(r, -j)); }

    // S_j multiplier, chi(2^-j |k|)
    double lowpass_j(int j, double r) const { return chi(std::ldexp(r, -j)); }

    bool block_in_range(int j) const { return j >= j_min && j <= j_max; }
};

// j_min = 0 (block 0 carries |k| = 1); j_max is the smallest j making the
// truncated partition exact at the lattice corner, i.e. (3/2) 2^j >= max|k|.
inline DyadicProfile build_profile(const Grid& grid) {
    DyadicProfile p;
    p.grid = grid;
    p.j_min = 0;
    int j = 0;
    while (1.5 * std::ldexp(1.0, j) < grid.max_k())
        ++j;
    p.j_max = j;
    return p;
}

namespace detail {

template <typename Field>
Field apply_radial_multiplier(const Field& f, const DyadicProfile& p, int j, bool lowpass) {
    Field out = f;
    for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const double r = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        const double m = lowpass ? p.lowpass_j(j, r) : p.phi_j(j, r);
        if constexpr (std::is_same_v<Field, SpectralVectorField>) {
            for (int c = 0; c < 3; ++c)
                out.coeffs[c][i] *= m;
        } else {
            out.coeffs[i] *= m;
        }
    });
    return out;
}

} // namespace detail

inline SpectralVectorField delta_j(const SpectralVectorField& f, int j, const DyadicProfile& p) {
    if (!p.block_in_range(j))
        throw BlockOutOfRange("delta_j: block index outside resolvable range");
    return detail::apply_radial_multiplier(f, p, j, false);
}

// S_j f (low-pass); any j accepted, S_j == identity once j > j_max.
inline SpectralVectorField lowpass_sj(const SpectralVectorField& f, int j,
                                      const DyadicProfile& p) {
    return detail::apply_radial_multiplier(f, p, j, true);
}

struct BlockDecomposition {
    DyadicProfile profile;
    SpectralVectorField lowpass;               // S_{j_min} f
    std::map<int, SpectralVectorField> blocks; // Delta_j f, j in [j_min, j_max]
};

inline BlockDecomposition decompose(const SpectralVectorField& f, const DyadicProfile& p) {
    BlockDecomposition d;
    d.profile = p;
    d.lowpass = lowpass_sj(f, p.j_min, p);
    for (int j = p.j_min; j <= p.j_max; ++j)
        d.blocks.emplace(j, delta_j(f, j, p));
    return d;
}

inline double block_sup_norm(const SpectralVectorField& f, int j, const DyadicProfile& p) {
    return linf_norm(inverse_transform(delta_j(f, j, p)));
}

inline double sobolev_hs(const SpectralVectorField& f, double s) {
    const Grid& g = f.grid;
    const int n = g.n();
    std::vector<double> terms(g.size());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t i = g.index(ix, iy, iz);
                const double w = std::pow(1.0 + g.k_squared(ix, iy, iz), s);
                terms[i] = w * (std::norm(f.coeffs[0][i]) + std::norm(f.coeffs[1][i]) +
                                std::norm(f.coeffs[2][i]));
            }
    return std::sqrt(detail::pairwise_sum(terms));
}

// Homogeneous counterpart |k|^s; k = 0 is excluded (it plays the role of the
// polynomials quotiented out in the continuum definition).
inline double sobolev_hs_dot(const SpectralVectorField& f, double s) {
    const Grid& g = f.grid;
    const int n = g.n();
    std::vector<double> terms(g.size(), 0.0);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const double k2 = g.k_squared(ix, iy, iz);
                if (k2 == 0.0)
                    continue;
                const std::size_t i = g.index(ix, iy, iz);
                terms[i] = std::pow(k2, s) * (std::norm(f.coeffs[0][i]) +
                                              std::norm(f.coeffs[1][i]) +
                                              std::norm(f.coeffs[2][i]));
            }
    return std::sqrt(detail::pairwise_sum(terms));
}

namespace detail {

inline void check_besov_exponent(double e) {
    if (!(e == 2.0 || std::isinf(e)))
        throw UnsupportedExponent("besov_norm: only p,q in {2, inf} are supported");
}

inline double block_lp(const SpectralVectorField& f, int j, const DyadicProfile& p, double e) {
    const SpectralVectorField blk = delta_j(f, j, p);
    if (e == 2.0)
        return l2_norm(blk);
    return linf_norm(inverse_transform(blk)); // e == inf
}

} // namespace detail

// Homogeneous Besov norm over the resolvable blocks [j_min, j_max].
inline double besov_norm(const SpectralVectorField& f, double s, double p, double q,
                         const DyadicProfile& prof) {
    detail::check_besov_exponent(p);
    detail::check_besov_exponent(q);
    std::vector<double> terms;
    terms.reserve(prof.j_max - prof.j_min + 1);
    for (int j = prof.j_min; j <= prof.j_max; ++j)
        terms.push_back(std::pow(2.0, j * s) * detail::block_lp(f, j, prof, p));
    if (std::isinf(q)) {
        double m = 0.0;
        for (double t : terms)
            m = std::max(m, t);
        return m;
    }
    for (double& t : terms)
        t *= t;
    return std::sqrt(detail::pairwise_sum(terms));
}

// ---- oversampled evaluation (sup-norm sampling-error control) ----

// Evaluate the trigonometric interpolant on a factor-times finer grid via
// zero-padded spectral embedding. Coarse Nyquist content is split half/half
// onto +-n/2 so the embedded spectrum stays Hermitian.
inline PhysicalVectorField refine_physical(const SpectralVectorField& f, int factor) {
    if (factor <= 1)
        return inverse_transform(f);
    const Grid& g = f.grid;
    const Grid fine(g.n() * factor, g.box_length());
    SpectralVectorField embedded(fine);
    const int n = g.n();
    auto targets = [&](int i) {
        std::vector<std::pair<int, double>> t;
        const int k = g.k_int(i);
        if (k == n / 2) {
            t.push_back({n / 2, 0.5});
            t.push_back({fine.n() - n / 2, 0.5});
        } else {
            t.push_back({k >= 0 ? k : k + fine.n(), 1.0});
        }
        return t;
    };
    for (int ix = 0; ix < n; ++ix) {
        const auto tx = targets(ix);
        for (int iy = 0; iy < n; ++iy) {
            const auto ty = targets(iy);
            for (int iz = 0; iz < n; ++iz) {
                const auto tz = targets(iz);
                const std::size_t src = g.index(ix, iy, iz);
                for (const auto& [jx, wx] : tx)
                    for (const auto& [jy, wy] : ty)
                        for (const auto& [jz, wz] : tz) {
                            const std::size_t dst = fine.index(jx, jy, jz);
                            const double w = wx * wy * wz;
                            for (int c = 0; c < 3; ++c)
                                embedded.coeffs[c][dst] += w * f.coeffs[c][src];
                        }
            }
        }
    }
    return inverse_transform(embedded);
}

inline double oversampled_sup(const SpectralVectorField& f, int factor) {
    return linf_norm(refine_physical(f, factor));
}

// ---- Bernstein scaling check ----

struct BernsteinReport {
    int deriv_order = 1;
    double p = 2.0, q = 2.0;
    std::vector<int> blocks;
    std::vector<double> log2_ratio; // mean over trials, per block
    double slope = 0.0;
    double expected_slope = 0.0;
};

namespace detail {

// One random envelope per trial, shared by every block so the per-j ratios
// are comparable; coefficients g(2^-j k) e^{-i k.x0} over the annulus, with
// g > 0 smooth and even in k so the field is real and concentrates like the
// Bernstein extremal family. Radial support [0.8, 1.9] stays inside the phi
// annulus.
struct BernsteinTemplateParams {
    std::array<double, 3> x0{};
    double a_xx = 0.0, a_yz = 0.0, rad_wiggle = 0.0;

    static BernsteinTemplateParams draw(const Grid& g, Rng& rng) {
        BernsteinTemplateParams tp;
        for (int c = 0; c < 3; ++c)
            tp.x0[c] = rng.uniform(0.0, g.box_length());
        tp.a_xx = rng.uniform(-0.25, 0.25);
        tp.a_yz = rng.uniform(-0.25, 0.25);
        tp.rad_wiggle = rng.uniform(-0.2, 0.2);
        return tp;
    }
};

inline SpectralVectorField bernstein_template(const Grid& g, int j,
                                              const BernsteinTemplateParams& tp) {
    SpectralVectorField f(g);
    const double scale = std::ldexp(1.0, j);
    for_each_mode(g, [&](std::size_t i, const std::array<double, 3>& k) {
        const double r = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        const double rho = r / scale;
        if (rho <= 0.8 || rho >= 1.9)
            return;
        const double bump = DyadicProfile::rise((rho - 0.8) / 0.3) *
                            (1.0 - DyadicProfile::rise((rho - 1.6) / 0.3));
        if (bump == 0.0)
            return;
        // even modulation keeps fhat(-k) = conj(fhat(k))
        const double ang = 1.0 + tp.a_xx * (k[0] * k[0]) / (r * r) +
                           tp.a_yz * (k[1] * k[2]) / (r * r) +
                           tp.rad_wiggle * std::sin(3.0 * rho);
        const double phase = k[0] * tp.x0[0] + k[1] * tp.x0[1] + k[2] * tp.x0[2];
        const cplx coeff = bump * ang * std::polar(1.0, -phase);
        f.coeffs[0][i] = coeff;
        f.coeffs[1][i] = 0.6 * coeff;
        f.coeffs[2][i] = -0.3 * coeff;
    });
    return f;
}

inline double bernstein_norm(const SpectralVectorField& f, double e) {
    if (e == 2.0)
        return l2_norm(f);
    return oversampled_sup(f, 4); // e == inf
}

} // namespace detail

// Fits the log2 slope of r_j = ||d^alpha Delta_j f||_q / ||Delta_j f||_p over
// the blocks whose annulus fits inside the lattice; the Bernstein estimate
// predicts slope k + 3(1/p - 1/q) for derivative order k.
inline BernsteinReport bernstein_scaling_check(const DyadicProfile& prof, double p, double q,
                                               int trials, int deriv_order = 1) {
    detail::check_besov_exponent(p);
    detail::check_besov_exponent(q);
    if (std::isinf(p) && q == 2.0)
        throw UnsupportedExponent("bernstein_scaling_check: requires p <= q");
    if (trials < 1)
        trials = 1;

    const Grid& g = prof.grid;
    std::vector<int> blocks;
    for (int j = 1; j <= prof.j_max - 1; ++j)
        if (1.9 * std::ldexp(1.0, j) <= g.max_k_axis())
            blocks.push_back(j);
    if (blocks.size() < 3)
        throw InsufficientRange("bernstein_scaling_check: fewer than 3 resolvable blocks");

    BernsteinReport rep;
    rep.deriv_order = deriv_order;
    rep.p = p;
    rep.q = q;
    rep.blocks = blocks;
    rep.log2_ratio.assign(blocks.size(), 0.0);
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    rep.expected_slope = deriv_order + 3.0 * (inv_p - inv_q);

    for (int t = 0; t < trials; ++t) {
        Rng rng(0x5eed0000u + static_cast<std::uint64_t>(t));
        const auto tp = detail::BernsteinTemplateParams::draw(g, rng);
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const int j = blocks[bi];
            const SpectralVectorField f = detail::bernstein_template(g, j, tp);
            const SpectralVectorField blk = delta_j(f, j, prof);
            const SpectralVectorField num_field =
                deriv_order == 0 ? blk : partial_derivative(blk, 0);
            const double num = detail::bernstein_norm(num_field, q);
            const double den = detail::bernstein_norm(blk, p);
            rep.log2_ratio[bi] += std::log2(num / den) / trials;
        }
    }

    // least-squares slope of log2_ratio against j
    const std::size_t m = blocks.size();
    double jbar = 0.0, rbar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        jbar += blocks[i];
        rbar += rep.log2_ratio[i];
    }
    jbar /= m;
    rbar /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (blocks[i] - jbar) * (blocks[i] - jbar);
        sxy += (blocks[i] - jbar) * (rep.log2_ratio[i] - rbar);
    }
    rep.slope = sxy / sxx;
    return rep;
}

} // namespace mmp
