// time_integration.hpp: the Picard successive-approximation solver and the
// production IMEX integrating-factor stepper.
//
// Both schemes share one building block: the exact per-mode exponential of
// the linear operator (diffusion, the chi curl-couplings between u and
// omega, 2 chi omega, kappa grad div omega; nu-diffusion for b). For each
// wavevector the u-omega block diagonalizes in the helical basis
// {e+, e-, khat} with curl acting as -+|k| on e+-, leaving three real
// symmetric 2x2 channels with closed-form exponentials. b decays by
// exp(-nu |k|^2 dt) componentwise.
//
// One step of either scheme is
//     y+ = E (y + dt/2 F_lo) + dt/2 F_hi,
// trapezoidal quadrature of the explicit forcing against the integrating
// factor. The IMEX stepper takes F from a Heun predictor; the Picard solver
// freezes F along the previous iterate's trajectory, reproducing the
// linearized iteration of the existence construction with initial data
// low-passed to S_{n+2}.

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>

#include "mmp/monitors.hpp"

namespace mmp {

struct Trajectory {
    std::vector<double> times;
    std::vector<MmpState> states;
};

class ModePropagator {
  public:
    ModePropagator(const Grid& grid, const MmpParams& params, double dt)
        : grid_(grid), dt_(dt) {
        if (!(dt > 0.0))
            throw ValidationError("ModePropagator: dt must be positive");
        params.validate();
        const std::size_t m = grid.size();
        blocks_.resize(m);
        eb_.resize(m);
        const int n = grid.n();
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz)
                    build_mode(grid.index(ix, iy, iz), grid.wavevector(ix, iy, iz), params);
    }

    double dt() const { return dt_; }
    const Grid& grid() const { return grid_; }

    // y+ = E y (exact linear flow over dt)
    MmpState apply(const MmpState& y) const {
        MmpState out(grid_);
        out.time = y.time + dt_;
        const std::size_t m = grid_.size();
        for (std::size_t i = 0; i < m; ++i)
            apply_mode(i, y, nullptr, nullptr, out);
        return out;
    }

    // y+ = E (y + dt/2 F_lo) + dt/2 F_hi
    MmpState step(const MmpState& y, const Tendency& f_lo, const Tendency& f_hi) const {
        MmpState out(grid_);
        out.time = y.time + dt_;
        const std::size_t m = grid_.size();
        for (std::size_t i = 0; i < m; ++i)
            apply_mode(i, y, &f_lo, &f_hi, out);
        return out;
    }

  private:
    struct Block {
        // 3x3 complex blocks of the u-omega propagator
        std::array<cplx, 9> uu{}, uo{}, ou{}, oo{};
    };

    static void add_outer(std::array<cplx, 9>& dst, const std::array<cplx, 3>& e, double w) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                dst[r * 3 + c] += w * e[r] * std::conj(e[c]);
    }

    // exp(dt [[-a, d], [d, -b]]) for the real symmetric channel matrix
    static std::array<double, 4> exp2x2(double a, double b, double d, double dt) {
        const double mean = 0.5 * (a + b);
        const double dev = 0.5 * (b - a); // traceless part [[dev, d], [d, -dev]]
        const double r = std::sqrt(dev * dev + d * d);
        const double scale = std::exp(-mean * dt);
        double ch, sh_over_r;
        if (r * dt < 1e-8) {
            ch = 1.0 + 0.5 * (r * dt) * (r * dt);
            sh_over_r = dt * (1.0 + (r * dt) * (r * dt) / 6.0);
        } else {
            ch = std::cosh(r * dt);
            sh_over_r = std::sinh(r * dt) / r;
        }
        return {scale * (ch + sh_over_r * dev), scale * (sh_over_r * d),
                scale * (sh_over_r * d), scale * (ch - sh_over_r * dev)};
    }

    void build_mode(std::size_t i, const std::array<double, 3>& k, const MmpParams& p) {
        Block blk;
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        eb_[i] = std::exp(-p.nu * k2 * dt_);
        if (k2 == 0.0) {
            // mean flow: u and b means conserved, omega mean decays by 2 chi
            const double eo = std::exp(-2.0 * p.chi * dt_);
            for (int c = 0; c < 3; ++c) {
                blk.uu[c * 3 + c] = 1.0;
                blk.oo[c * 3 + c] = eo;
            }
            blocks_[i] = blk;
            return;
        }

        const double kn = std::sqrt(k2);
        const std::array<double, 3> khat{k[0] / kn, k[1] / kn, k[2] / kn};
        // orthonormal frame (t1, t2, khat)
        int a = 0;
        for (int c = 1; c < 3; ++c)
            if (std::abs(khat[c]) < std::abs(khat[a]))
                a = c;
        std::array<double, 3> axis{}, t1{}, t2{};
        axis[a] = 1.0;
        t1 = {khat[1] * axis[2] - khat[2] * axis[1], khat[2] * axis[0] - khat[0] * axis[2],
              khat[0] * axis[1] - khat[1] * axis[0]};
        const double t1n = std::sqrt(t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]);
        for (auto& v : t1)
            v /= t1n;
        t2 = {khat[1] * t1[2] - khat[2] * t1[1], khat[2] * t1[0] - khat[0] * t1[2],
              khat[0] * t1[1] - khat[1] * t1[0]};

        // helical vectors e_s = (t1 -+ i t2)/sqrt(2); i k x e_s = -+ |k| e_s
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        std::array<std::array<cplx, 3>, 2> hel;
        for (int c = 0; c < 3; ++c) {
            hel[0][c] = cplx(t1[c], -t2[c]) * inv_sqrt2; // e+
            hel[1][c] = cplx(t1[c], +t2[c]) * inv_sqrt2; // e-
        }
        const std::array<cplx, 3> e0{cplx(khat[0], 0.0), cplx(khat[1], 0.0), cplx(khat[2], 0.0)};

        const double a_u = (p.mu + p.chi) * k2;
        const double b_perp = p.gamma * k2 + 2.0 * p.chi;
        const double b_par = (p.gamma + p.kappa) * k2 + 2.0 * p.chi;

        for (int s = 0; s < 2; ++s) {
            const double c_s = (s == 0) ? -kn : kn; // curl eigenvalue on the channel
            const auto e = exp2x2(a_u, b_perp, p.chi * c_s, dt_);
            add_outer(blk.uu, hel[s], e[0]);
            add_outer(blk.uo, hel[s], e[1]);
            add_outer(blk.ou, hel[s], e[2]);
            add_outer(blk.oo, hel[s], e[3]);
        }
        // longitudinal channel: no curl coupling, kappa acts on omega only
        add_outer(blk.uu, e0, std::exp(-a_u * dt_));
        add_outer(blk.oo, e0, std::exp(-b_par * dt_));
        blocks_[i] = blk;
    }

    static std::array<cplx, 3> mat_vec(const std::array<cplx, 9>& m,
                                       const std::array<cplx, 3>& v) {
        return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
                m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
                m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
    }

    void apply_mode(std::size_t i, const MmpState& y, const Tendency* f_lo,
                    const Tendency* f_hi, MmpState& out) const {
        const double half_dt = 0.5 * dt_;
        std::array<cplx, 3> u{}, o{}, b{};
        for (int c = 0; c < 3; ++c) {
            u[c] = y.u.coeffs[c][i];
            o[c] = y.omega.coeffs[c][i];
            b[c] = y.b.coeffs[c][i];
            if (f_lo) {
                u[c] += half_dt * f_lo->du.coeffs[c][i];
                o[c] += half_dt * f_lo->domega.coeffs[c][i];
                b[c] += half_dt * f_lo->db.coeffs[c][i];
            }
        }
        const Block& blk = blocks_[i];
        const auto un = mat_vec(blk.uu, u);
        const auto uo = mat_vec(blk.uo, o);
        const auto on = mat_vec(blk.ou, u);
        const auto oo = mat_vec(blk.oo, o);
        for (int c = 0; c < 3; ++c) {
            cplx uc = un[c] + uo[c];
            cplx oc = on[c] + oo[c];
            cplx bc = eb_[i] * b[c];
            if (f_hi) {
                uc += half_dt * f_hi->du.coeffs[c][i];
                oc += half_dt * f_hi->domega.coeffs[c][i];
                bc += half_dt * f_hi->db.coeffs[c][i];
            }
            out.u.coeffs[c][i] = uc;
            out.omega.coeffs[c][i] = oc;
            out.b.coeffs[c][i] = bc;
        }
    }

    Grid grid_;
    double dt_;
    std::vector<Block> blocks_;
    std::vector<double> eb_;
};

// ---- IMEX integrating-factor stepper ----

struct StepOptions {
    bool nonlinear = true; // false: pure linear flow (exact per-mode exponential)
};

inline constexpr double kNormOverflowGuard = 1e12;

namespace detail {

inline void check_stability(const MmpState& s) {
    const double norms[3] = {l2_norm(s.u), l2_norm(s.omega), l2_norm(s.b)};
    for (double v : norms)
        if (!(v < kNormOverflowGuard))
            throw Instability("imex_step: norm exceeded overflow guard (dt too large or "
                              "genuine growth)",
                              s.time);
}

} // namespace detail

inline MmpState imex_step(const MmpState& state, const ModePropagator& prop,
                          StepOptions opts = {}) {
    require_state_grids(state);
    require_same_grid(state.u.grid, prop.grid(), "imex_step");
    if (!opts.nonlinear)
        return prop.apply(state);

    const double dt = prop.dt();
    const Tendency f0 = nonlinear_forcing(state);

    // Heun predictor: E(y + dt F0)
    MmpState pred = state;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < prop.grid().size(); ++i) {
            pred.u.coeffs[c][i] += dt * f0.du.coeffs[c][i];
            pred.omega.coeffs[c][i] += dt * f0.domega.coeffs[c][i];
            pred.b.coeffs[c][i] += dt * f0.db.coeffs[c][i];
        }
    pred = prop.apply(pred);

    const Tendency f1 = nonlinear_forcing(pred);
    MmpState out = prop.step(state, f0, f1);
    out.u = leray_project(out.u);
    out.b = leray_project(out.b);
    detail::check_stability(out);
    return out;
}

inline MmpState imex_step(const MmpState& state, const MmpParams& params, double dt,
                          StepOptions opts = {}) {
    const ModePropagator prop(state.grid(), params, dt);
    return imex_step(state, prop, opts);
}

// Advisory advection-CFL bound; diffusion needs no guard (it is exact).
inline double advective_dt_bound(const MmpState& state, double safety = 0.5) {
    const double u_sup = linf_norm(inverse_transform(state.u));
    const double b_sup = linf_norm(inverse_transform(state.b));
    const double speed = std::max(u_sup, b_sup);
    const double kmax = state.grid().max_k_axis();
    if (speed * kmax <= 0.0)
        return std::numeric_limits<double>::infinity();
    return safety / (speed * kmax);
}

struct IntegrateOptions {
    int monitor_cadence = 10;   // record every this many steps (and at t=0, t=T)
    RecordOptions record;       // what each record carries
    int trajectory_stride = 0;  // 0: keep initial and final states only
    std::function<void(const MmpState&, int step)> on_step; // e.g. snapshot writer
};

// Fixed-step integration to T with diagnostics recording. The final partial
// step is shortened so the trajectory lands exactly on T.
inline std::pair<Trajectory, DiagnosticsSeries>
imex_integrate(const MmpState& initial, const MmpParams& params, double t_final, double dt,
               const DyadicProfile& profile, const IntegrateOptions& opts = {}) {
    require_state_grids(initial);
    params.validate();
    if (!(dt > 0.0))
        throw ValidationError("imex_integrate: dt must be positive");

    Trajectory traj;
    DiagnosticsSeries series;
    series.params = params;
    series.grid_n = initial.grid().n();
    series.box_length = initial.grid().box_length();
    series.j_min = profile.j_min;
    series.j_max = profile.j_max;

    MmpState y = initial;
    y.time = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    series.records.push_back(record_state(y, profile, opts.record));

    if (t_final > 0.0) {
        const int steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
        const ModePropagator prop(initial.grid(), params, dt);
        std::optional<ModePropagator> tail; // shorter final step, if any
        for (int s = 1; s <= steps; ++s) {
            const bool last = (s == steps);
            const double target = last ? t_final : s * dt;
            const double step_dt = target - y.time;
            if (last && std::abs(step_dt - dt) > 1e-12 * std::max(1.0, dt)) {
                if (!tail)
                    tail.emplace(initial.grid(), params, step_dt);
                y = imex_step(y, *tail);
            } else {
                y = imex_step(y, prop);
            }
            y.time = target;
            if (opts.on_step)
                opts.on_step(y, s);
            const bool record_now = last || (opts.monitor_cadence > 0 &&
                                             s % opts.monitor_cadence == 0);
            if (record_now)
                series.records.push_back(record_state(y, profile, opts.record));
            const bool keep = last || (opts.trajectory_stride > 0 &&
                                       s % opts.trajectory_stride == 0);
            if (keep) {
                traj.times.push_back(y.time);
                traj.states.push_back(y);
            }
        }
    }
    return {std::move(traj), std::move(series)};
}

// ---- Picard successive approximation ----

struct PicardConfig {
    double s = 2.0;            // Sobolev index; iterates are compared in H^{s-1}
    double t_final = 0.1;      // horizon T
    int time_nodes = 32;       // M (uniform spacing dt = T/M)
    int max_iters = 30;
    double cauchy_tol = 1e-10; // sup-in-time H^{s-1} threshold
    int truncation_offset = 2; // the "+2" in the S_{n+2} initial-data low-pass

    void validate() const {
        if (!(s > 1.5))
            throw ValidationError("PicardConfig: s must exceed 3/2");
        if (!(t_final >= 0.0))
            throw ValidationError("PicardConfig: T must be nonnegative");
        if (time_nodes < 1)
            throw ValidationError("PicardConfig: need at least one time node");
        if (max_iters < 1 || !(cauchy_tol > 0.0))
            throw ValidationError("PicardConfig: bad iteration controls");
    }
};

// Low-pass S_{n+offset} applied to all three initial fields. For
// n + offset > j_max the multiplier is identically 1 and the data returns
// unchanged.
inline MmpState truncate_initial_data(const SpectralVectorField& u0,
                                      const SpectralVectorField& omega0,
                                      const SpectralVectorField& b0, int n_iter,
                                      const DyadicProfile& profile, int offset = 2) {
    require_same_grid(u0.grid, omega0.grid, "truncate_initial_data");
    require_same_grid(u0.grid, b0.grid, "truncate_initial_data");
    MmpState s(u0.grid);
    const int j = n_iter + offset;
    s.u = lowpass_sj(u0, j, profile);
    s.omega = lowpass_sj(omega0, j, profile);
    s.b = lowpass_sj(b0, j, profile);
    s.time = 0.0;
    return s;
}

// T0 = 1 / (4 C0 C1 ||(u0, omega0, b0)||_{H^s}^2); purely advisory, the
// calibration constants are not computable from first principles.
inline double estimate_t0(const SpectralVectorField& u0, const SpectralVectorField& omega0,
                          const SpectralVectorField& b0, double s, double c0 = 1.0,
                          double c1 = 1.0) {
    if (!(c0 > 0.0) || !(c1 > 0.0))
        throw ValidationError("estimate_t0: C0, C1 must be positive");
    const double a = sobolev_hs(u0, s), b_ = sobolev_hs(omega0, s), c = sobolev_hs(b0, s);
    const double norm_sq = a * a + b_ * b_ + c * c;
    if (norm_sq == 0.0)
        return std::numeric_limits<double>::infinity();
    return 1.0 / (4.0 * c0 * c1 * norm_sq);
}

struct PicardReport {
    std::vector<double> diffs;  // sup-in-time H^{s-1} distance between iterates
    std::vector<double> ratios; // diffs[i] / diffs[i-1]
    int iterations = 0;
    bool converged = false;
    double t0_estimate = 0.0; // with C0 = C1 = 1
    bool horizon_warning = false;
};

inline std::pair<Trajectory, PicardReport>
picard_solve(const SpectralVectorField& u0, const SpectralVectorField& omega0,
             const SpectralVectorField& b0, const MmpParams& params, const PicardConfig& config,
             const DyadicProfile& profile) {
    config.validate();
    params.validate();
    require_same_grid(u0.grid, omega0.grid, "picard_solve");
    require_same_grid(u0.grid, b0.grid, "picard_solve");
    {
        const double scale = std::max(1.0, std::max(linf_coeff(u0), linf_coeff(b0)));
        if (divergence_linf(u0) > 1e-8 * scale || divergence_linf(b0) > 1e-8 * scale)
            throw ValidationError("picard_solve: u0 and b0 must be divergence-free");
    }

    const Grid& grid = u0.grid;
    const int m_nodes = config.time_nodes;
    const double dt = config.t_final / m_nodes;

    PicardReport report;
    report.t0_estimate = estimate_t0(u0, omega0, b0, config.s);
    report.horizon_warning = config.t_final > report.t0_estimate;

    Trajectory prev;
    prev.times.resize(m_nodes + 1);
    prev.states.assign(m_nodes + 1, MmpState(grid));
    for (int m = 0; m <= m_nodes; ++m) {
        prev.times[m] = m * dt;
        prev.states[m].time = m * dt;
    }

    if (config.t_final == 0.0) {
        Trajectory traj;
        traj.times = {0.0};
        traj.states = {truncate_initial_data(u0, omega0, b0, 0, profile,
                                             config.truncation_offset)};
        report.converged = true;
        report.iterations = 1;
        report.diffs = {0.0};
        return {std::move(traj), std::move(report)};
    }

    const ModePropagator prop(grid, params, dt);
    const double order = config.s - 1.0;

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        const int n_index = iter - 1; // building iterate n_index + 1
        Trajectory cur;
        cur.times.resize(m_nodes + 1);
        cur.states.reserve(m_nodes + 1);
        cur.states.push_back(truncate_initial_data(u0, omega0, b0, n_index, profile,
                                                   config.truncation_offset));
        cur.times[0] = 0.0;

        Tendency f_lo = nonlinear_forcing(prev.states[0]);
        for (int m = 0; m < m_nodes; ++m) {
            Tendency f_hi = nonlinear_forcing(prev.states[m + 1]);
            MmpState next = prop.step(cur.states.back(), f_lo, f_hi);
            next.time = (m + 1) * dt;
            cur.times[m + 1] = next.time;
            cur.states.push_back(std::move(next));
            f_lo = std::move(f_hi);
        }

        double diff = 0.0;
        for (int m = 0; m <= m_nodes; ++m) {
            MmpState d(grid);
            d.u = cur.states[m].u;
            d.u -= prev.states[m].u;
            d.omega = cur.states[m].omega;
            d.omega -= prev.states[m].omega;
            d.b = cur.states[m].b;
            d.b -= prev.states[m].b;
            diff = std::max(diff, state_sobolev_hs(d, order));
        }
        report.diffs.push_back(diff);
        if (report.diffs.size() >= 2) {
            const double prev_diff = report.diffs[report.diffs.size() - 2];
            report.ratios.push_back(prev_diff > 0.0
                                        ? diff / prev_diff
                                        : (diff > 0.0 ? std::numeric_limits<double>::infinity()
                                                      : 0.0));
        }
        report.iterations = iter;
        prev = std::move(cur);
        if (diff < config.cauchy_tol) {
            report.converged = true;
            break;
        }
    }

    if (!report.converged && !report.ratios.empty() && report.ratios.back() >= 1.0)
        throw NoConvergence("picard_solve: iterate differences are not contracting "
                            "(T exceeds the contraction horizon for this data)");
    return {std::move(prev), std::move(report)};
}

} // namespace mmp
