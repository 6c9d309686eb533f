// monitors.hpp: runtime regularity diagnostics. Records carry the energy
// ledger quantities, Sobolev norms, curl norms, and the per-block sup-norms
// ||Delta_j(curl u)||_inf that feed the frequency-localized blow-up
// indicator delta. All window integrals are trapezoidal on the record
// times, with linear interpolation where a window edge falls between
// records, so integrals are additive across adjacent windows.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mmp/dynamics.hpp"
#include "mmp/littlewood_paley.hpp"

namespace mmp {

struct DiagnosticsRecord {
    double time = 0.0;
    std::array<double, 3> l2_energy{};  // ||u||^2, ||omega||^2, ||b||^2
    std::array<double, 5> dissipation{}; // ||grad u||^2, ||grad omega||^2,
                                         // ||grad b||^2, ||div omega||^2, ||omega||^2
    std::map<double, double> hs_norms;   // s -> ||(u, omega, b)||_{H^s}
    std::array<double, 3> curl_l2{};     // ||H||, ||I||, ||J||
    std::map<int, double> block_sups;    // j -> ||Delta_j(curl u)||_inf
    double curl_u_sup = 0.0;             // ||curl u||_inf (grid max)
    double curl_b_sup = 0.0;
    std::map<double, double> grad_u_lp;  // p -> ||grad u||_p (grid quadrature)
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRecord> records;
    MmpParams params;
    int grid_n = 0;
    double box_length = 0.0;
    int j_min = 0, j_max = 0; // block range the ZZ-sup was truncated to
};

inline double state_sobolev_hs(const MmpState& s, double order) {
    const double a = sobolev_hs(s.u, order);
    const double b = sobolev_hs(s.omega, order);
    const double c = sobolev_hs(s.b, order);
    return std::sqrt(a * a + b * b + c * c);
}

// ||grad u||_p with the gradient magnitude taken in Frobenius norm.
inline double grad_lp_norm(const SpectralVectorField& u, double p) {
    if (p == 2.0)
        return std::sqrt(grad_l2_norm_sq(u));
    const Grid& g = u.grid;
    std::array<PhysicalVectorField, 3> d;
    for (int axis = 0; axis < 3; ++axis)
        d[axis] = inverse_transform(partial_derivative(u, axis));
    const std::size_t m = g.size();
    if (std::isinf(p)) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c)
                    s += d[a].values[c][i] * d[a].values[c][i];
            worst = std::max(worst, s);
        }
        return std::sqrt(worst);
    }
    const double mean = detail::pairwise_map_sum(m, [&](std::size_t i) {
                            double s = 0.0;
                            for (int a = 0; a < 3; ++a)
                                for (int c = 0; c < 3; ++c)
                                    s += d[a].values[c][i] * d[a].values[c][i];
                            return std::pow(std::sqrt(s), p);
                        }) /
                        static_cast<double>(m);
    return std::pow(mean, 1.0 / p);
}

struct RecordOptions {
    std::vector<double> hs_list = {2.0};
    std::vector<double> lp_list = {};  // exponents for ||grad u||_p
    bool block_sups = true;
};

inline DiagnosticsRecord record_state(const MmpState& state, const DyadicProfile& profile,
                                      const RecordOptions& opts = {}) {
    DiagnosticsRecord r;
    r.time = state.time;
    r.l2_energy = {l2_norm_sq(state.u), l2_norm_sq(state.omega), l2_norm_sq(state.b)};
    r.dissipation = {grad_l2_norm_sq(state.u), grad_l2_norm_sq(state.omega),
                     grad_l2_norm_sq(state.b), l2_norm_sq(divergence(state.omega)),
                     l2_norm_sq(state.omega)};
    for (double s : opts.hs_list)
        r.hs_norms[s] = state_sobolev_hs(state, s);

    const SpectralVectorField h = curl(state.u);
    const SpectralVectorField icap = curl(state.omega);
    const SpectralVectorField jcap = curl(state.b);
    r.curl_l2 = {l2_norm(h), l2_norm(icap), l2_norm(jcap)};
    r.curl_u_sup = linf_norm(inverse_transform(h));
    r.curl_b_sup = linf_norm(inverse_transform(jcap));
    if (opts.block_sups)
        for (int j = profile.j_min; j <= profile.j_max; ++j)
            r.block_sups[j] = block_sup_norm(h, j, profile);
    for (double p : opts.lp_list)
        r.grad_u_lp[p] = grad_lp_norm(state.u, p);
    return r;
}

namespace detail {

// Trapezoid over [a, b] against the record times, linearly interpolating at
// the window edges. Requires first <= a <= b <= last.
inline double integrate_window(const std::vector<double>& t, const std::vector<double>& v,
                               double a, double b) {
    if (t.size() < 2 || a < t.front() - 1e-12 || b > t.back() + 1e-12 || a > b)
        throw WindowUnderflow("integrate_window: window outside the covered time span");
    a = std::max(a, t.front());
    b = std::min(b, t.back());
    auto value_at = [&](double x, std::size_t seg) {
        const double w = (x - t[seg]) / (t[seg + 1] - t[seg]);
        return v[seg] + w * (v[seg + 1] - v[seg]);
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double lo = std::max(a, t[i]);
        const double hi = std::min(b, t[i + 1]);
        if (hi <= lo)
            continue;
        acc += 0.5 * (hi - lo) * (value_at(lo, i) + value_at(hi, i));
    }
    return acc;
}

inline std::vector<double> record_times(const DiagnosticsSeries& s) {
    std::vector<double> t;
    t.reserve(s.records.size());
    for (const auto& r : s.records)
        t.push_back(r.time);
    return t;
}

} // namespace detail

struct LedgerReport {
    double worst_violation = 0.0; // max_t of E(t) + 2 int D - E(0); <= 0 means the
                                  // inequality holds with slack
    double worst_time = 0.0;
    double tolerance = 0.0;
    bool ok = true;
};

// Discrete form of the global energy inequality: E(t) + 2 int_0^t [mu ||grad u||^2
// + gamma ||grad omega||^2 + nu ||grad b||^2 + kappa ||div omega||^2
// + chi ||omega||^2] <= E(0), up to time-discretization error ~ dt^2.
inline LedgerReport energy_ledger(const DiagnosticsSeries& series, double c_tol = 10.0) {
    const auto& rec = series.records;
    if (rec.size() < 2)
        throw InsufficientData("energy_ledger: need at least 2 records");
    const MmpParams& p = series.params;
    auto energy = [](const DiagnosticsRecord& r) {
        return r.l2_energy[0] + r.l2_energy[1] + r.l2_energy[2];
    };
    auto dissip = [&](const DiagnosticsRecord& r) {
        return p.mu * r.dissipation[0] + p.gamma * r.dissipation[1] + p.nu * r.dissipation[2] +
               p.kappa * r.dissipation[3] + p.chi * r.dissipation[4];
    };
    LedgerReport out;
    const double e0 = energy(rec.front());
    double acc = 0.0;
    double peak_d = dissip(rec.front());
    out.worst_violation = 0.0;
    out.worst_time = rec.front().time;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        const double dt = rec[i].time - rec[i - 1].time;
        acc += 0.5 * dt * (dissip(rec[i]) + dissip(rec[i - 1]));
        peak_d = std::max(peak_d, dissip(rec[i]));
        const double viol = energy(rec[i]) + 2.0 * acc - e0;
        if (viol > out.worst_violation) {
            out.worst_violation = viol;
            out.worst_time = rec[i].time;
        }
    }
    const double span = rec.back().time - rec.front().time;
    const double dt_typ = span / static_cast<double>(rec.size() - 1);
    out.tolerance = c_tol * dt_typ * dt_typ * span * peak_d;
    out.ok = out.worst_violation <= out.tolerance;
    return out;
}

struct DeltaResult {
    double delta = 0.0;
    int argmax_j = 0;
    int j_min = 0, j_max = 0; // truncation range the sup ran over
    double epsilon = 0.0;
};

// sup over resolvable j of int_{T-eps}^T ||Delta_j(curl u)||_inf dt. The
// sup over all integers is truncated to the grid-resolvable blocks; the
// result reports that range.
inline DeltaResult blowup_indicator(const DiagnosticsSeries& series, double epsilon) {
    const auto& rec = series.records;
    if (rec.empty())
        throw InsufficientData("blowup_indicator: empty series");
    if (!(epsilon > 0.0))
        throw WindowUnderflow("blowup_indicator: epsilon must be positive");
    const double t_end = rec.back().time;
    const double t_start = t_end - epsilon;
    if (rec.size() < 2 || t_start < rec.front().time - 1e-12)
        throw WindowUnderflow("blowup_indicator: epsilon exceeds the covered time span");

    const auto times = detail::record_times(series);
    DeltaResult out;
    out.epsilon = epsilon;
    out.j_min = series.j_min;
    out.j_max = series.j_max;
    bool first = true;
    for (int j = series.j_min; j <= series.j_max; ++j) {
        std::vector<double> vals;
        vals.reserve(rec.size());
        for (const auto& r : rec) {
            auto it = r.block_sups.find(j);
            vals.push_back(it == r.block_sups.end() ? 0.0 : it->second);
        }
        const double integral = detail::integrate_window(times, vals, t_start, t_end);
        if (first || integral > out.delta) {
            out.delta = integral;
            out.argmax_j = j;
            first = false;
        }
    }
    return out;
}

struct BkmResult {
    double curl_u_integral = 0.0;
    double curl_b_integral = 0.0;
};

inline BkmResult bkm_integral(const DiagnosticsSeries& series, double t0, double t1) {
    const auto times = detail::record_times(series);
    std::vector<double> vu, vb;
    vu.reserve(times.size());
    vb.reserve(times.size());
    for (const auto& r : series.records) {
        vu.push_back(r.curl_u_sup);
        vb.push_back(r.curl_b_sup);
    }
    return {detail::integrate_window(times, vu, t0, t1),
            detail::integrate_window(times, vb, t0, t1)};
}

// int ||grad u||_p^q dt with q = 2p/(2p-3), the equality case of
// 2/q + 3/p = 2.
inline double zhou_integral(const DiagnosticsSeries& series, double p, double t0, double t1) {
    if (!(p > 1.5) || std::isinf(p))
        throw ExponentOutOfRange("zhou_integral: p must lie in (3/2, inf)");
    const double q = 2.0 * p / (2.0 * p - 3.0);
    const auto times = detail::record_times(series);
    std::vector<double> v;
    v.reserve(times.size());
    for (const auto& r : series.records) {
        auto it = r.grad_u_lp.find(p);
        if (it == r.grad_u_lp.end())
            throw InsufficientData("zhou_integral: records do not carry ||grad u||_p for this p");
        v.push_back(std::pow(it->second, q));
    }
    return detail::integrate_window(times, v, t0, t1);
}

// N >= floor((2/log 2) log+(C (||H|| + ||I|| + ||J||) / min(mu,gamma,nu))) + 1
// with log+(x) = log(x + e).
inline int adaptive_cutoff_n(double h_l2, double i_l2, double j_l2, const MmpParams& params,
                             double c_const) {
    if (!(c_const > 0.0))
        throw ValidationError("adaptive_cutoff_n: C must be positive");
    const double x = c_const * (h_l2 + i_l2 + j_l2) / params.min_diffusivity();
    const double log_plus = std::log(x + std::exp(1.0));
    return static_cast<int>(std::floor(2.0 / std::log(2.0) * log_plus)) + 1;
}

// sup over records in [t0, t1] of ||H|| + ||I|| + ||J||.
inline double zeta_sup(const DiagnosticsSeries& series, double t0, double t1) {
    bool any = false;
    double worst = 0.0;
    for (const auto& r : series.records) {
        if (r.time < t0 - 1e-12 || r.time > t1 + 1e-12)
            continue;
        any = true;
        worst = std::max(worst, r.curl_l2[0] + r.curl_l2[1] + r.curl_l2[2]);
    }
    if (!any)
        throw WindowUnderflow("zeta_sup: no records inside the window");
    return worst;
}

} // namespace mmp
