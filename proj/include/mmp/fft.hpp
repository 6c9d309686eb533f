// fft.hpp: forward/inverse spectral transforms, backed by FFTW (c2c,
// FFTW_ESTIMATE so planning is deterministic run to run).
//
// forward_transform divides by n^3, so coeff(0) equals the field mean and a
// unit cosine lands 1/2 on each of the +-k bins. inverse_transform checks
// Hermitian symmetry first and the imaginary residue afterwards; both
// tolerances are scaled by the coefficient magnitude so large fields do not
// trip false positives.

#pragma once

#include <fftw3.h>

#include <memory>
#include <unordered_map>

#include "mmp/field.hpp"

namespace mmp {

namespace detail {

class FftEngine {
  public:
    explicit FftEngine(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
        buf_ = fftw_alloc_complex(size_);
        fwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftEngine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    // physical (real) -> normalized coefficients
    void forward(const std::vector<double>& in, std::vector<cplx>& out) {
        for (std::size_t i = 0; i < size_; ++i) {
            buf_[i][0] = in[i];
            buf_[i][1] = 0.0;
        }
        fftw_execute(fwd_);
        out.resize(size_);
        const double inv = 1.0 / static_cast<double>(size_);
        for (std::size_t i = 0; i < size_; ++i)
            out[i] = cplx(buf_[i][0], buf_[i][1]) * inv;
    }

    // coefficients -> complex grid values (synthesis, no scaling)
    void backward(const std::vector<cplx>& in, std::vector<cplx>& out) {
        for (std::size_t i = 0; i < size_; ++i) {
            buf_[i][0] = in[i].real();
            buf_[i][1] = in[i].imag();
        }
        fftw_execute(bwd_);
        out.resize(size_);
        for (std::size_t i = 0; i < size_; ++i)
            out[i] = cplx(buf_[i][0], buf_[i][1]);
    }

  private:
    int n_;
    std::size_t size_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

inline FftEngine& fft_engine(int n) {
    static std::unordered_map<int, std::unique_ptr<FftEngine>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<FftEngine>(n)).first;
    return *it->second;
}

} // namespace detail

inline SpectralScalarField forward_transform(const PhysicalScalarField& f) {
    SpectralScalarField out(f.grid);
    detail::fft_engine(f.grid.n()).forward(f.values, out.coeffs);
    return out;
}

inline SpectralVectorField forward_transform(const PhysicalVectorField& f) {
    SpectralVectorField out(f.grid);
    auto& eng = detail::fft_engine(f.grid.n());
    for (int c = 0; c < 3; ++c)
        eng.forward(f.values[c], out.coeffs[c]);
    return out;
}

namespace detail {

inline PhysicalScalarField inverse_component(const Grid& grid, const std::vector<cplx>& coeffs,
                                             double tol_scale) {
    auto& eng = fft_engine(grid.n());
    std::vector<cplx> vals;
    eng.backward(coeffs, vals);
    double imag_max = 0.0;
    PhysicalScalarField out(grid);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        imag_max = std::max(imag_max, std::abs(vals[i].imag()));
        out.values[i] = vals[i].real();
    }
    if (imag_max > 1e-10 * tol_scale)
        throw HermitianViolation("inverse_transform: imaginary residue above tolerance");
    return out;
}

} // namespace detail

inline PhysicalVectorField inverse_transform(const SpectralVectorField& f) {
    const double scale = std::max(1.0, linf_coeff(f) * f.grid.size());
    if (hermitian_defect(f) > 1e-10 * std::max(1.0, linf_coeff(f)))
        throw HermitianViolation("inverse_transform: spectral data is not Hermitian-symmetric");
    PhysicalVectorField out(f.grid);
    for (int c = 0; c < 3; ++c)
        out.values[c] = detail::inverse_component(f.grid, f.coeffs[c], scale).values;
    return out;
}

inline PhysicalScalarField inverse_transform(const SpectralScalarField& f) {
    double scale = 1.0;
    for (const auto& v : f.coeffs)
        scale = std::max(scale, std::abs(v) * f.grid.size());
    return detail::inverse_component(f.grid, f.coeffs, scale);
}

} // namespace mmp
