// snapshot.hpp: binary state persistence.
//
// Layout (little-endian):
//   bytes 0..3   magic "MMP1"
//   u32          format version (currently 1)
//   u32          grid n
//   f64          simulation time
//   f64 x 5      mu, chi, kappa, gamma, nu
//   then 3 fields (u, omega, b) x 3 components x n^3 complex coefficients,
//   each an (re, im) f64 pair, k-lattice row-major (z index fastest).
// Round trips are bit-exact. The box length is not part of the header; a
// snapshot read back is placed on the default 2*pi box.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mmp/dynamics.hpp"

namespace mmp {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotData {
    MmpState state;
    MmpParams params;
    std::uint32_t version = 0;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const char* what) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        throw ParseError(std::string("snapshot: truncated while reading ") + what);
}

} // namespace detail

inline void write_snapshot(const std::string& path, const MmpState& state,
                           const MmpParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("snapshot: cannot open '" + path + "' for writing");
    out.write("MMP1", 4);
    detail::write_pod(out, kSnapshotVersion);
    detail::write_pod(out, static_cast<std::uint32_t>(state.grid().n()));
    detail::write_pod(out, state.time);
    detail::write_pod(out, params.mu);
    detail::write_pod(out, params.chi);
    detail::write_pod(out, params.kappa);
    detail::write_pod(out, params.gamma);
    detail::write_pod(out, params.nu);
    for (const SpectralVectorField* f : {&state.u, &state.omega, &state.b})
        for (int c = 0; c < 3; ++c)
            for (const cplx& v : f->coeffs[c]) {
                const double re = v.real(), im = v.imag();
                detail::write_pod(out, re);
                detail::write_pod(out, im);
            }
    if (!out)
        throw ParseError("snapshot: write to '" + path + "' failed");
}

inline SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("snapshot: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MMP1", 4) != 0)
        throw ParseError("snapshot: bad magic in '" + path + "'");
    SnapshotData snap;
    detail::read_pod(in, snap.version, "version");
    if (snap.version != kSnapshotVersion)
        throw ParseError("snapshot: unsupported format version");
    std::uint32_t n = 0;
    detail::read_pod(in, n, "grid size");
    double time = 0.0;
    detail::read_pod(in, time, "time");
    detail::read_pod(in, snap.params.mu, "mu");
    detail::read_pod(in, snap.params.chi, "chi");
    detail::read_pod(in, snap.params.kappa, "kappa");
    detail::read_pod(in, snap.params.gamma, "gamma");
    detail::read_pod(in, snap.params.nu, "nu");

    Grid grid;
    try {
        grid = Grid(static_cast<int>(n));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("snapshot: bad grid header: ") + e.what());
    }
    snap.state = MmpState(grid);
    snap.state.time = time;
    for (SpectralVectorField* f : {&snap.state.u, &snap.state.omega, &snap.state.b})
        for (int c = 0; c < 3; ++c)
            for (cplx& v : f->coeffs[c]) {
                double re = 0.0, im = 0.0;
                detail::read_pod(in, re, "coefficients");
                detail::read_pod(in, im, "coefficients");
                v = cplx(re, im);
            }
    // trailing garbage counts as corruption too
    char probe;
    in.read(&probe, 1);
    if (!in.eof())
        throw ParseError("snapshot: trailing bytes after payload");
    return snap;
}

} // namespace mmp
