// presets.hpp: reproducible initial conditions. Fields are constructed
// directly in spectral space, band-limited inside the dealias cutoff, with
// u and b divergence-free.

#pragma once

#include "mmp/dynamics.hpp"
#include "mmp/rng.hpp"

namespace mmp {

namespace detail {

inline std::size_t mode_index(const Grid& g, int kx, int ky, int kz) {
    const int n = g.n();
    auto wrap = [n](int k) { return k >= 0 ? k : k + n; };
    return g.index(wrap(kx), wrap(ky), wrap(kz));
}

// Adds coeff at k and its conjugate at -k (one Hermitian pair).
inline void set_mode(SpectralVectorField& f, int kx, int ky, int kz,
                     const std::array<cplx, 3>& coeff) {
    const std::size_t i = mode_index(f.grid, kx, ky, kz);
    const std::size_t j = mode_index(f.grid, -kx, -ky, -kz);
    for (int c = 0; c < 3; ++c) {
        f.coeffs[c][i] += coeff[c];
        f.coeffs[c][j] += std::conj(coeff[c]);
    }
}

} // namespace detail

// amp * (cos x sin y sin z, -sin x cos y sin z, 0): the classical
// divergence-free trigonometric field; modes at (+-1, +-1, +-1).
inline SpectralVectorField taylor_green(const Grid& g, double amp) {
    SpectralVectorField f(g);
    for (int sx : {+1, -1})
        for (int sy : {+1, -1})
            for (int sz : {+1, -1}) {
                const cplx cos_w = 0.5;
                const cplx sin_x = cplx(0.0, -0.5 * sx);
                const cplx sin_y = cplx(0.0, -0.5 * sy);
                const cplx sin_z = cplx(0.0, -0.5 * sz);
                const std::size_t i = detail::mode_index(g, sx, sy, sz);
                f.coeffs[0][i] += amp * cos_w * sin_y * sin_z;
                f.coeffs[1][i] += -amp * sin_x * cos_w * sin_z;
            }
    return f;
}

// permuted variant, also divergence-free: amp * (sin x cos y sin z,
// -cos x sin y sin z, 0)
inline SpectralVectorField taylor_green_alt(const Grid& g, double amp) {
    SpectralVectorField f(g);
    for (int sx : {+1, -1})
        for (int sy : {+1, -1})
            for (int sz : {+1, -1}) {
                const cplx cos_w = 0.5;
                const cplx sin_x = cplx(0.0, -0.5 * sx);
                const cplx sin_y = cplx(0.0, -0.5 * sy);
                const cplx sin_z = cplx(0.0, -0.5 * sz);
                const std::size_t i = detail::mode_index(g, sx, sy, sz);
                f.coeffs[0][i] += amp * sin_x * cos_w * sin_z;
                f.coeffs[1][i] += -amp * cos_w * sin_y * sin_z;
            }
    return f;
}

struct PresetAmplitudes {
    double u = 1.0;
    double omega = 0.5;
    double b = 0.5;
};

inline MmpState make_taylor_green(const Grid& g, const PresetAmplitudes& amp) {
    MmpState s(g);
    s.u = taylor_green(g, amp.u);
    s.omega = taylor_green(g, amp.omega);
    s.b = taylor_green_alt(g, amp.b);
    return s;
}

// single divergence-free mode at k = (1, 0, 0): u = amp_u (0, cos x, 0),
// omega = amp_omega (0, 0, cos x), b = amp_b (0, 0, cos x)
inline MmpState make_single_mode(const Grid& g, const PresetAmplitudes& amp) {
    MmpState s(g);
    detail::set_mode(s.u, 1, 0, 0, {0.0, 0.5 * amp.u, 0.0});
    detail::set_mode(s.omega, 1, 0, 0, {0.0, 0.0, 0.5 * amp.omega});
    detail::set_mode(s.b, 1, 0, 0, {0.0, 0.0, 0.5 * amp.b});
    return s;
}

// Seeded band-limited field: white Gaussian coefficients on 0 < |k|_inf <=
// k_cut, Hermitian-symmetrized, then Leray-projected if requested and
// rescaled to the requested L2 norm.
inline SpectralVectorField random_band_limited(const Grid& g, double l2_target, int k_cut,
                                               Rng& rng, bool solenoidal) {
    SpectralVectorField f(g);
    const int n = g.n();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const int kx = g.k_int(ix), ky = g.k_int(iy), kz = g.k_int(iz);
                if (kx == 0 && ky == 0 && kz == 0)
                    continue;
                if (std::abs(kx) > k_cut || std::abs(ky) > k_cut || std::abs(kz) > k_cut)
                    continue;
                const std::size_t i = g.index(ix, iy, iz);
                for (int c = 0; c < 3; ++c)
                    f.coeffs[c][i] = cplx(rng.normal(), rng.normal());
            }
    // symmetrize: fhat <- (fhat(k) + conj(fhat(-k))) / 2
    SpectralVectorField sym(g);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t i = g.index(ix, iy, iz);
                const std::size_t j =
                    g.index(g.conj_index(ix), g.conj_index(iy), g.conj_index(iz));
                for (int c = 0; c < 3; ++c)
                    sym.coeffs[c][i] = 0.5 * (f.coeffs[c][i] + std::conj(f.coeffs[c][j]));
            }
    if (solenoidal)
        sym = leray_project(sym);
    const double norm = l2_norm(sym);
    if (norm > 0.0 && l2_target > 0.0)
        sym *= l2_target / norm;
    else if (l2_target == 0.0)
        sym *= 0.0;
    return sym;
}

inline MmpState make_random_seeded(const Grid& g, const PresetAmplitudes& amp,
                                   std::uint64_t seed, int k_cut = 0) {
    if (k_cut <= 0)
        k_cut = g.n() / 3;
    Rng rng(seed);
    MmpState s(g);
    s.u = random_band_limited(g, amp.u, k_cut, rng, true);
    s.omega = random_band_limited(g, amp.omega, k_cut, rng, false);
    s.b = random_band_limited(g, amp.b, k_cut, rng, true);
    return s;
}

} // namespace mmp
