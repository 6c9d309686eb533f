// field.hpp: physical and spectral fields on the periodic grid, plus the
// norm and inner-product kernels used throughout.
//
// Conventions: f(x) = sum_k fhat(k) e^{i k.x}, so coeff(0) is the mean.
// L^p norms use the normalized measure dx/L^3; with that choice Parseval
// reads mean(|f|^2) = sum_k |fhat(k)|^2. All reductions run through
// pairwise (tree) summation in a fixed order so results are deterministic
// and accurate at the 1e-12 tolerances the checks demand.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "mmp/errors.hpp"
#include "mmp/grid.hpp"

namespace mmp {

using cplx = std::complex<double>;

struct PhysicalScalarField {
    Grid grid;
    std::vector<double> values;

    PhysicalScalarField() = default;
    explicit PhysicalScalarField(const Grid& g) : grid(g), values(g.size(), 0.0) {}
};

struct PhysicalVectorField {
    Grid grid;
    std::array<std::vector<double>, 3> values;

    PhysicalVectorField() = default;
    explicit PhysicalVectorField(const Grid& g) : grid(g) {
        for (auto& c : values)
            c.assign(g.size(), 0.0);
    }
};

struct SpectralScalarField {
    Grid grid;
    std::vector<cplx> coeffs;

    SpectralScalarField() = default;
    explicit SpectralScalarField(const Grid& g) : grid(g), coeffs(g.size(), cplx{}) {}
};

struct SpectralVectorField {
    Grid grid;
    std::array<std::vector<cplx>, 3> coeffs;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const Grid& g) : grid(g) {
        for (auto& c : coeffs)
            c.assign(g.size(), cplx{});
    }

    SpectralVectorField& operator+=(const SpectralVectorField& o) {
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < coeffs[c].size(); ++i)
                coeffs[c][i] += o.coeffs[c][i];
        return *this;
    }
    SpectralVectorField& operator-=(const SpectralVectorField& o) {
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < coeffs[c].size(); ++i)
                coeffs[c][i] -= o.coeffs[c][i];
        return *this;
    }
    SpectralVectorField& operator*=(double a) {
        for (auto& comp : coeffs)
            for (auto& v : comp)
                v *= a;
        return *this;
    }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b))
        throw GridMismatch(std::string(what) + ": fields live on different grids");
}

namespace detail {

// Fixed-order tree reduction; the recursion pattern depends only on the
// length, never on thread count or data.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename F>
double pairwise_map_sum(std::size_t count, F&& term) {
    // Materializing the terms keeps the summation order independent of the
    // call site; count is at most n^3 here so the buffer is acceptable.
    std::vector<double> buf(count);
    for (std::size_t i = 0; i < count; ++i)
        buf[i] = term(i);
    return pairwise_sum(buf);
}

} // namespace detail

// ---- spectral-side norms (exact quadrature via Parseval) ----

inline double l2_norm_sq(const SpectralVectorField& f) {
    const std::size_t m = f.grid.size();
    return detail::pairwise_map_sum(m, [&](std::size_t i) {
        return std::norm(f.coeffs[0][i]) + std::norm(f.coeffs[1][i]) + std::norm(f.coeffs[2][i]);
    });
}

inline double l2_norm(const SpectralVectorField& f) { return std::sqrt(l2_norm_sq(f)); }

inline double l2_norm_sq(const SpectralScalarField& f) {
    return detail::pairwise_map_sum(f.coeffs.size(),
                                    [&](std::size_t i) { return std::norm(f.coeffs[i]); });
}

inline double l2_norm(const SpectralScalarField& f) { return std::sqrt(l2_norm_sq(f)); }

// Real L^2 pairing of the underlying real fields.
inline double inner_product(const SpectralVectorField& f, const SpectralVectorField& g) {
    require_same_grid(f.grid, g.grid, "inner_product");
    const std::size_t m = f.grid.size();
    return detail::pairwise_map_sum(m, [&](std::size_t i) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c)
            s += std::real(f.coeffs[c][i] * std::conj(g.coeffs[c][i]));
        return s;
    });
}

inline double linf_coeff(const SpectralVectorField& f) {
    double m = 0.0;
    for (const auto& comp : f.coeffs)
        for (const auto& v : comp)
            m = std::max(m, std::abs(v));
    return m;
}

// Max over modes of |fhat(-k) - conj(fhat(k))|.
inline double hermitian_defect(const SpectralVectorField& f) {
    const Grid& g = f.grid;
    const int n = g.n();
    double worst = 0.0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t a = g.index(ix, iy, iz);
                const std::size_t b = g.index(g.conj_index(ix), g.conj_index(iy), g.conj_index(iz));
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(f.coeffs[c][b] - std::conj(f.coeffs[c][a])));
            }
    return worst;
}

// ---- physical-side norms (grid quadrature) ----

inline double grid_l2_norm(const PhysicalVectorField& f) {
    const std::size_t m = f.grid.size();
    const double mean_sq = detail::pairwise_map_sum(m, [&](std::size_t i) {
                               double s = 0.0;
                               for (int c = 0; c < 3; ++c)
                                   s += f.values[c][i] * f.values[c][i];
                               return s;
                           }) /
                           static_cast<double>(m);
    return std::sqrt(mean_sq);
}

inline double linf_norm(const PhysicalVectorField& f) {
    const std::size_t m = f.grid.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = f.values[0][i] * f.values[0][i] + f.values[1][i] * f.values[1][i] +
                         f.values[2][i] * f.values[2][i];
        worst = std::max(worst, s);
    }
    return std::sqrt(worst);
}

inline double lp_norm(const PhysicalVectorField& f, double p) {
    if (std::isinf(p))
        return linf_norm(f);
    if (!(p >= 1.0))
        throw UnsupportedExponent("lp_norm: p must be >= 1");
    const std::size_t m = f.grid.size();
    const double mean = detail::pairwise_map_sum(m, [&](std::size_t i) {
                            const double s = f.values[0][i] * f.values[0][i] +
                                             f.values[1][i] * f.values[1][i] +
                                             f.values[2][i] * f.values[2][i];
                            return std::pow(std::sqrt(s), p);
                        }) /
                        static_cast<double>(m);
    return std::pow(mean, 1.0 / p);
}

} // namespace mmp
