// dynamics.hpp: right-hand side of the incompressible magneto-micropolar
// system on the torus, the derived curl system, and the degenerate-parameter
// reductions.
//
// Evolved system (velocity u, micro-rotation omega, magnetic field b):
//
//   du/dt     = P[ -(u.grad)u + (b.grad)b + chi curl omega ] + (mu+chi) lap u
//   domega/dt = -(u.grad)omega + gamma lap omega + kappa grad(div omega)
//               - 2 chi omega + chi curl u
//   db/dt     = P[ -(u.grad)b + (b.grad)u ] + nu lap b
//
// with P the Leray projector; the pressure-type gradient grad(p + b^2) never
// appears because P annihilates every gradient. Advective terms are formed in
// divergence form, (f.grad)g = div(g (x) f), pseudo-spectrally with 2/3
// dealiasing on inputs and output, so the quadratic terms equal exact
// spectral convolutions and the discrete energy identities close to rounding.
// omega is not projected and carries the full -kappa grad(div omega) term.

#pragma once

#include "mmp/fft.hpp"
#include "mmp/operators.hpp"

namespace mmp {

struct MmpParams {
    double mu = 1.0;    // kinematic viscosity
    double chi = 0.0;   // vortex viscosity
    double kappa = 0.0; // spin viscosity (grad div)
    double gamma = 1.0; // spin viscosity (laplacian)
    double nu = 1.0;    // 1/nu is the magnetic Reynolds number

    void validate() const {
        if (!(mu > 0.0))
            throw ValidationError("mu must be positive");
        if (!(gamma > 0.0))
            throw ValidationError("gamma must be positive");
        if (!(nu > 0.0))
            throw ValidationError("nu must be positive");
        if (chi < 0.0)
            throw ValidationError("chi must be nonnegative");
        if (kappa < 0.0)
            throw ValidationError("kappa must be nonnegative");
    }

    double min_diffusivity() const { return std::min(mu, std::min(gamma, nu)); }
};

struct MmpState {
    SpectralVectorField u, omega, b;
    double time = 0.0;

    MmpState() = default;
    explicit MmpState(const Grid& g) : u(g), omega(g), b(g) {}

    const Grid& grid() const { return u.grid; }
};

struct Tendency {
    SpectralVectorField du, domega, db;
};

inline void require_state_grids(const MmpState& s) {
    require_same_grid(s.u.grid, s.omega.grid, "MmpState");
    require_same_grid(s.u.grid, s.b.grid, "MmpState");
}

namespace detail {

// Physical-space copies of a dealiased spectral field, one vector<double>
// per component.
inline std::array<std::vector<double>, 3> to_physical_dealiased(const SpectralVectorField& f) {
    SpectralVectorField t = dealias(f);
    return inverse_transform(t).values;
}

// out_j = i k_l (g_j f_l)^, the divergence-form advection (f.grad)g, given
// the 3x3 product transforms prod[j][l] = (g_j f_l)^.
inline SpectralVectorField assemble_divergence_form(
    const Grid& grid, const std::array<std::array<SpectralScalarField, 3>, 3>& prod) {
    SpectralVectorField out(grid);
    for_each_mode(grid, [&](std::size_t i, const std::array<double, 3>& k) {
        for (int j = 0; j < 3; ++j) {
            cplx acc{};
            for (int l = 0; l < 3; ++l)
                acc += cplx(0.0, k[l]) * prod[j][l].coeffs[i];
            out.coeffs[j][i] = acc;
        }
    });
    detail::dealias_inplace(out);
    return out;
}

} // namespace detail

// (f.grad)g in divergence form with dealiasing; f must be solenoidal for the
// two forms to coincide.
inline SpectralVectorField advect(const SpectralVectorField& f, const SpectralVectorField& g) {
    require_same_grid(f.grid, g.grid, "advect");
    const auto fp = detail::to_physical_dealiased(f);
    const auto gp = detail::to_physical_dealiased(g);
    const Grid& grid = f.grid;
    std::array<std::array<SpectralScalarField, 3>, 3> prod;
    PhysicalScalarField work(grid);
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            for (std::size_t i = 0; i < grid.size(); ++i)
                work.values[i] = gp[j][i] * fp[l][i];
            prod[j][l] = forward_transform(work);
        }
    return detail::assemble_divergence_form(grid, prod);
}

// The five advective terms, each in divergence form and dealiased.
struct QuadraticTerms {
    SpectralVectorField uu; // (u.grad)u
    SpectralVectorField bb; // (b.grad)b
    SpectralVectorField uo; // (u.grad)omega
    SpectralVectorField ub; // (u.grad)b
    SpectralVectorField bu; // (b.grad)u
};

namespace detail {

// Shares the physical-space transforms of u, omega, b across all five
// quadratic terms (39 scalar FFTs per evaluation).
inline QuadraticTerms quadratic_terms(const MmpState& state) {
    const Grid& grid = state.grid();
    const std::size_t m = grid.size();

    const auto up = to_physical_dealiased(state.u);
    const auto op = to_physical_dealiased(state.omega);
    const auto bp = to_physical_dealiased(state.b);

    // uu and bb tensors are symmetric (6 unique transforms each); the mixed
    // families omega_j u_l, b_j u_l, u_j b_l need the full 9 (u_j b_l also
    // serves (b.grad)u as the transpose of b_j u_l)
    std::array<std::array<SpectralScalarField, 3>, 3> uu, bb, ou, bu, ub;
    PhysicalScalarField work(grid);
    auto product = [&](const std::vector<double>& a, const std::vector<double>& b_) {
        for (std::size_t i = 0; i < m; ++i)
            work.values[i] = a[i] * b_[i];
        return forward_transform(work);
    };
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            if (l >= j) {
                uu[j][l] = product(up[j], up[l]);
                bb[j][l] = product(bp[j], bp[l]);
            } else {
                uu[j][l] = uu[l][j];
                bb[j][l] = bb[l][j];
            }
            ou[j][l] = product(op[j], up[l]);
            bu[j][l] = product(bp[j], up[l]);
            ub[j][l] = product(up[j], bp[l]);
        }

    QuadraticTerms q;
    q.uu = assemble_divergence_form(grid, uu);
    q.bb = assemble_divergence_form(grid, bb);
    q.uo = assemble_divergence_form(grid, ou);
    q.ub = assemble_divergence_form(grid, bu);
    q.bu = assemble_divergence_form(grid, ub);
    return q;
}

} // namespace detail

// Full right-hand side.
inline Tendency rhs(const MmpState& state, const MmpParams& params) {
    require_state_grids(state);
    const Grid& grid = state.grid();
    const QuadraticTerms q = detail::quadratic_terms(state);

    Tendency t{SpectralVectorField(grid), SpectralVectorField(grid), SpectralVectorField(grid)};
    const SpectralVectorField curl_omega = curl(state.omega);
    const SpectralVectorField curl_u = curl(state.u);

    detail::for_each_mode(grid, [&](std::size_t i, const std::array<double, 3>& k) {
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const cplx ik_dot_omega =
            cplx(0.0, 1.0) * (k[0] * state.omega.coeffs[0][i] + k[1] * state.omega.coeffs[1][i] +
                              k[2] * state.omega.coeffs[2][i]);
        for (int c = 0; c < 3; ++c) {
            t.du.coeffs[c][i] = -q.uu.coeffs[c][i] + q.bb.coeffs[c][i] +
                                params.chi * curl_omega.coeffs[c][i] -
                                (params.mu + params.chi) * k2 * state.u.coeffs[c][i];
            t.domega.coeffs[c][i] = -q.uo.coeffs[c][i] -
                                    (params.gamma * k2 + 2.0 * params.chi) *
                                        state.omega.coeffs[c][i] +
                                    params.kappa * cplx(0.0, k[c]) * ik_dot_omega +
                                    params.chi * curl_u.coeffs[c][i];
            t.db.coeffs[c][i] = -q.ub.coeffs[c][i] + q.bu.coeffs[c][i] -
                                params.nu * k2 * state.b.coeffs[c][i];
        }
    });

    // projection eliminates the pressure-type gradients; db is projected too,
    // to suppress rounding-level divergence drift
    t.du = leray_project(t.du);
    t.db = leray_project(t.db);
    return t;
}

// Explicit (nonlinear) part of the splitting used by the time integrators:
// everything in rhs except diffusion, the chi curl-couplings, 2 chi omega,
// and kappa grad div omega, which the per-mode propagator treats exactly.
inline Tendency nonlinear_forcing(const MmpState& state) {
    require_state_grids(state);
    const Grid& grid = state.grid();
    QuadraticTerms q = detail::quadratic_terms(state);
    Tendency f{SpectralVectorField(grid), SpectralVectorField(grid), SpectralVectorField(grid)};
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f.du.coeffs[c][i] = -q.uu.coeffs[c][i] + q.bb.coeffs[c][i];
            f.domega.coeffs[c][i] = -q.uo.coeffs[c][i];
            f.db.coeffs[c][i] = -q.ub.coeffs[c][i] + q.bu.coeffs[c][i];
        }
    f.du = leray_project(f.du);
    f.db = leray_project(f.db);
    return f;
}

// ---- curl system ----

struct CurlTendency {
    SpectralVectorField dh, di, dj;
};

// epsilon_ijk (d_j f_l)(d_l g_k): the gradient-contraction term produced
// when curl passes through an advective product,
//     curl((f.grad)g) = (f.grad)(curl g) + contraction(f, g).
// For self-advection of a solenoidal field it collapses to the classical
// stretching form, contraction(f, f) = -(curl f . grad) f.
inline SpectralVectorField curl_contraction(const SpectralVectorField& f,
                                            const SpectralVectorField& g_field) {
    require_same_grid(f.grid, g_field.grid, "curl_contraction");
    const Grid& grid = f.grid;
    const SpectralVectorField fd = dealias(f);
    const SpectralVectorField gd = dealias(g_field);
    std::array<PhysicalVectorField, 3> df, dg; // df[a] = d_a f, all components
    for (int a = 0; a < 3; ++a) {
        df[a] = inverse_transform(partial_derivative(fd, a));
        dg[a] = inverse_transform(partial_derivative(gd, a));
    }
    PhysicalVectorField t(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto term = [&](int j, int k) {
            double s = 0.0;
            for (int l = 0; l < 3; ++l)
                s += df[j].values[l][i] * dg[l].values[k][i];
            return s;
        };
        t.values[0][i] = term(1, 2) - term(2, 1);
        t.values[1][i] = term(2, 0) - term(0, 2);
        t.values[2][i] = term(0, 1) - term(1, 0);
    }
    SpectralVectorField out = forward_transform(t);
    detail::dealias_inplace(out);
    return out;
}

// Tendencies of H = curl u, I = curl omega, J = curl b, i.e. the exact curl
// of the rhs expressed through the curl fields:
//   dH = -(u.grad)H + (H.grad)u + (b.grad)J - (J.grad)b + chi curl I
//        + (mu+chi) lap H
//   dI = -(u.grad)I - contraction(u, omega) + chi curl H + gamma lap I
//        - 2 chi I
//   dJ = -(u.grad)J - contraction(u, b) + (b.grad)H + contraction(b, u)
//        + nu lap J
// The kappa term drops out (curl grad div omega = 0). The u- and b-
// self-advection curls in dH take the classical transport/stretching form;
// the mixed advections keep their contraction terms, which do not collapse.
// Inputs must be consistent with the state.
inline CurlTendency curl_rhs(const SpectralVectorField& h, const SpectralVectorField& icap,
                             const SpectralVectorField& jcap, const MmpState& state,
                             const MmpParams& params) {
    require_state_grids(state);
    require_same_grid(h.grid, state.u.grid, "curl_rhs");
    require_same_grid(icap.grid, state.u.grid, "curl_rhs");
    require_same_grid(jcap.grid, state.u.grid, "curl_rhs");

    auto consistency = [](const SpectralVectorField& given, const SpectralVectorField& expect,
                          const char* name) {
        SpectralVectorField diff = given;
        diff -= expect;
        const double scale = std::max(1.0, l2_norm(expect));
        if (l2_norm(diff) > 1e-8 * scale)
            throw ConsistencyViolation(std::string("curl_rhs: ") + name +
                                       " is not the curl of the state field");
    };
    consistency(h, curl(state.u), "H");
    consistency(icap, curl(state.omega), "I");
    consistency(jcap, curl(state.b), "J");

    const Grid& grid = state.grid();
    CurlTendency t{SpectralVectorField(grid), SpectralVectorField(grid),
                   SpectralVectorField(grid)};

    // dH = -(u.grad)H + (H.grad)u + (b.grad)J - (J.grad)b + chi curl I + (mu+chi) lap H
    t.dh = advect(h, state.u); // (H.grad)u
    t.dh -= advect(state.u, h);
    t.dh += advect(state.b, jcap);
    t.dh -= advect(jcap, state.b);
    {
        SpectralVectorField lin = curl(icap);
        lin *= params.chi;
        t.dh += lin;
        SpectralVectorField diff = laplacian(h);
        diff *= (params.mu + params.chi);
        t.dh += diff;
    }

    t.di = curl_contraction(state.u, state.omega);
    t.di *= -1.0;
    t.di -= advect(state.u, icap);
    {
        SpectralVectorField lin = icap;
        lin *= -2.0 * params.chi;
        t.di += lin;
        SpectralVectorField ch = curl(h);
        ch *= params.chi;
        t.di += ch;
        SpectralVectorField diff = laplacian(icap);
        diff *= params.gamma;
        t.di += diff;
    }

    t.dj = curl_contraction(state.b, state.u);
    t.dj -= curl_contraction(state.u, state.b);
    t.dj -= advect(state.u, jcap);
    t.dj += advect(state.b, h);
    {
        SpectralVectorField diff = laplacian(jcap);
        diff *= params.nu;
        t.dj += diff;
    }

    return t;
}

// ---- reductions ----

enum class ReducedModel { navier_stokes, mhd, micropolar };

struct Reduction {
    MmpParams params;
    bool omega_must_vanish = false;
    bool b_must_vanish = false;
    const char* invariant_subspace = "";
};

// Parameter/initial-data constraints under which the system collapses to a
// classical sub-model; the named fields then stay zero for all time.
inline Reduction reduce_mode(const MmpParams& params, ReducedModel mode) {
    Reduction r;
    r.params = params;
    switch (mode) {
    case ReducedModel::navier_stokes:
        r.params.chi = 0.0;
        r.omega_must_vanish = true;
        r.b_must_vanish = true;
        r.invariant_subspace = "omega = 0, b = 0 (chi = 0): incompressible Navier-Stokes";
        break;
    case ReducedModel::mhd:
        r.params.chi = 0.0;
        r.omega_must_vanish = true;
        r.invariant_subspace = "omega = 0 (chi = 0): magneto-hydrodynamics";
        break;
    case ReducedModel::micropolar:
        r.b_must_vanish = true;
        r.invariant_subspace = "b = 0: micropolar fluid";
        break;
    }
    return r;
}

// Instantaneous energy balance: <rhs(y), y> + (mu+chi)||grad u||^2
// + gamma||grad omega||^2 + nu||grad b||^2 + kappa||div omega||^2
// + 2 chi||omega||^2 - 2 chi <curl u, omega>. Zero to rounding; every
// advective and pressure contribution cancels exactly.
inline double energy_balance_residual(const MmpState& state, const MmpParams& params) {
    const Tendency t = rhs(state, params);
    const double lhs = inner_product(t.du, state.u) + inner_product(t.domega, state.omega) +
                       inner_product(t.db, state.b);
    const double grad_u = grad_l2_norm_sq(state.u);
    const double grad_o = grad_l2_norm_sq(state.omega);
    const double grad_b = grad_l2_norm_sq(state.b);
    const double div_o = l2_norm_sq(divergence(state.omega));
    const double omega_sq = l2_norm_sq(state.omega);
    const double cross = inner_product(curl(state.u), state.omega);
    const double expected = -(params.mu + params.chi) * grad_u - params.gamma * grad_o -
                            params.nu * grad_b - params.kappa * div_o -
                            2.0 * params.chi * omega_sq + 2.0 * params.chi * cross;
    return lhs - expected;
}

} // namespace mmp
