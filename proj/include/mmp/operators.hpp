// operators.hpp: differential operators as Fourier multipliers, Leray
// projection, and the 2/3-rule dealias filter.
//
// Multipliers follow the lattice convention of grid.hpp: gradient ik,
// divergence ik., curl ikx, laplacian -|k|^2, lambda_s (1+|k|^2)^{s/2}.
// The Leray projector leaves the k=0 mode untouched (mean flow is
// conserved; the projector is undefined there).

#pragma once

#include "mmp/field.hpp"

namespace mmp {

namespace detail {

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    const int n = g.n();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                fn(g.index(ix, iy, iz), g.wavevector(ix, iy, iz));
}

} // namespace detail

inline SpectralVectorField gradient(const SpectralScalarField& f) {
    SpectralVectorField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const cplx v = f.coeffs[i];
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][i] = cplx(0.0, k[c]) * v;
    });
    return out;
}

inline SpectralVectorField gradient_of_component(const SpectralVectorField& f, int component) {
    SpectralScalarField s(f.grid);
    s.coeffs = f.coeffs[component];
    return gradient(s);
}

// ik_axis applied componentwise (derivative of a vector field along one axis).
inline SpectralVectorField partial_derivative(const SpectralVectorField& f, int axis) {
    SpectralVectorField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const cplx m(0.0, k[axis]);
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][i] = m * f.coeffs[c][i];
    });
    return out;
}

inline SpectralScalarField divergence(const SpectralVectorField& f) {
    SpectralScalarField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        out.coeffs[i] = cplx(0.0, 1.0) * (k[0] * f.coeffs[0][i] + k[1] * f.coeffs[1][i] +
                                          k[2] * f.coeffs[2][i]);
    });
    return out;
}

inline SpectralVectorField curl(const SpectralVectorField& f) {
    SpectralVectorField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const cplx fx = f.coeffs[0][i], fy = f.coeffs[1][i], fz = f.coeffs[2][i];
        out.coeffs[0][i] = cplx(0.0, 1.0) * (k[1] * fz - k[2] * fy);
        out.coeffs[1][i] = cplx(0.0, 1.0) * (k[2] * fx - k[0] * fz);
        out.coeffs[2][i] = cplx(0.0, 1.0) * (k[0] * fy - k[1] * fx);
    });
    return out;
}

inline SpectralVectorField laplacian(const SpectralVectorField& f) {
    SpectralVectorField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][i] = -k2 * f.coeffs[c][i];
    });
    return out;
}

inline SpectralVectorField lambda_s(const SpectralVectorField& f, double s) {
    SpectralVectorField out(f.grid);
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const double m = std::pow(1.0 + k2, 0.5 * s);
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][i] = m * f.coeffs[c][i];
    });
    return out;
}

inline SpectralVectorField leray_project(const SpectralVectorField& f) {
    SpectralVectorField out = f;
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0)
            return;
        const cplx kdotf = k[0] * out.coeffs[0][i] + k[1] * out.coeffs[1][i] +
                           k[2] * out.coeffs[2][i];
        const cplx factor = kdotf / k2;
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][i] -= k[c] * factor;
    });
    return out;
}

namespace detail {

// Keep |index| <= floor(n/3) per axis, zero the rest.
inline bool dealias_keep(const Grid& g, int ix, int iy, int iz) {
    const int cut = g.n() / 3;
    return std::abs(g.k_int(ix)) <= cut && std::abs(g.k_int(iy)) <= cut &&
           std::abs(g.k_int(iz)) <= cut;
}

inline void dealias_inplace(SpectralVectorField& f) {
    const Grid& g = f.grid;
    const int n = g.n();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                if (!dealias_keep(g, ix, iy, iz)) {
                    const std::size_t i = g.index(ix, iy, iz);
                    for (int c = 0; c < 3; ++c)
                        f.coeffs[c][i] = cplx{};
                }
}

} // namespace detail

inline SpectralVectorField dealias(const SpectralVectorField& f) {
    SpectralVectorField out = f;
    detail::dealias_inplace(out);
    return out;
}

// ||grad f||_2^2 = sum_k |k|^2 |fhat|^2 (exact spectral quadrature).
inline double grad_l2_norm_sq(const SpectralVectorField& f) {
    const Grid& g = f.grid;
    const int n = g.n();
    std::vector<double> terms(g.size());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t i = g.index(ix, iy, iz);
                terms[i] = g.k_squared(ix, iy, iz) *
                           (std::norm(f.coeffs[0][i]) + std::norm(f.coeffs[1][i]) +
                            std::norm(f.coeffs[2][i]));
            }
    return detail::pairwise_sum(terms);
}

// Max over modes of |k . fhat|; zero (to rounding) for solenoidal fields.
inline double divergence_linf(const SpectralVectorField& f) {
    double worst = 0.0;
    detail::for_each_mode(f.grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const cplx d = k[0] * f.coeffs[0][i] + k[1] * f.coeffs[1][i] + k[2] * f.coeffs[2][i];
        worst = std::max(worst, std::abs(d));
    });
    return worst;
}

} // namespace mmp
