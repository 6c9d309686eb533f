// grid.hpp: cubic periodic lattice descriptor and wavenumber bookkeeping.
//
// The domain is the torus [0, L)^3 sampled at n points per axis. Spectral
// coefficients live on the integer index lattice; axis index i maps to the
// signed integer wavenumber i for i <= n/2 and i - n otherwise, so the
// resolved set per axis is {-n/2+1, ..., n/2}, scaled by 2*pi/L.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace mmp {

class Grid {
  public:
    Grid() = default;

    explicit Grid(int n, double box_length = 2.0 * std::numbers::pi)
        : n_(n), box_length_(box_length) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("Grid: n must be even and >= 8");
        if (!(box_length > 0.0))
            throw std::invalid_argument("Grid: box_length must be positive");
        k_scale_ = 2.0 * std::numbers::pi / box_length_;
    }

    int n() const { return n_; }
    double box_length() const { return box_length_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    // Row-major storage, z fastest.
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n_ + iy) * n_ + iz;
    }

    // Signed integer wavenumber for an axis index in [0, n).
    int k_int(int i) const { return i <= n_ / 2 ? i : i - n_; }

    // Axis index of the conjugate mode -k.
    int conj_index(int i) const { return i == 0 ? 0 : n_ - i; }

    double k_scale() const { return k_scale_; }

    std::array<double, 3> wavevector(int ix, int iy, int iz) const {
        return {k_int(ix) * k_scale_, k_int(iy) * k_scale_, k_int(iz) * k_scale_};
    }

    double k_squared(int ix, int iy, int iz) const {
        const double kx = k_int(ix) * k_scale_;
        const double ky = k_int(iy) * k_scale_;
        const double kz = k_int(iz) * k_scale_;
        return kx * kx + ky * ky + kz * kz;
    }

    // Largest per-axis wavenumber magnitude, (n/2) * 2*pi/L.
    double max_k_axis() const { return (n_ / 2) * k_scale_; }

    // Largest Euclidean wavenumber on the lattice (corner mode).
    double max_k() const { return std::sqrt(3.0) * max_k_axis(); }

    double x_coord(int i) const { return box_length_ * i / n_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_ == b.n_ && a.box_length_ == b.box_length_;
    }

  private:
    int n_ = 0;
    double box_length_ = 2.0 * std::numbers::pi;
    double k_scale_ = 1.0;
};

} // namespace mmp
