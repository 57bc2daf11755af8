#pragma once

// Post-hoc trajectory analysis: tracking error, the growth-scaled rate
// statistic, coordination-state conservation drift, consensus spread, and
// the full-vs-averaged agreement sweep.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ues/costs.hpp"
#include "ues/dynamics.hpp"
#include "ues/integrate.hpp"

namespace ues {

/// Least-squares line fit of log(error) over a time window.
struct LogSlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

struct RunReport {
    double final_error = 0.0;       // max over agents at t_end
    double rate_sup = 0.0;          // sup over tail of phi(t) * error(t)
    double invariant_drift = 0.0;   // max |sum_j z_j(t) - sum_j z_j(t0)| per dim
    double consensus_spread = 0.0;  // max over tail of max_{i,j} ||x_i - x_j||
    double assumption2_ratio = 0.0; // max ||x*_dot(t)|| / phi^c(t) over samples
    LogSlopeFit tail_fit;           // fit of log error peaks over the tail window
    std::vector<double> times;
    std::vector<Eigen::VectorXd> agent_errors;  // per sample: ||x_i - x*|| per agent
};

namespace detail {

/// Reduces a sampled error series to per-window peaks. The probing ripple
/// crosses zero twice per period, which makes raw log-error fits meaningless;
/// the peaks track the envelope that the convergence statements bound.
inline void window_peaks(const std::vector<double>& t, const std::vector<double>& e,
                         std::vector<double>& tp, std::vector<double>& ep) {
    constexpr int kWindows = 50;
    if (t.empty()) return;
    const double t0 = t.front(), t1 = t.back();
    if (!(t1 > t0) || t.size() <= kWindows) {
        tp = t;
        ep = e;
        return;
    }
    const double width = (t1 - t0) / kWindows;
    std::size_t i = 0;
    for (int w = 0; w < kWindows; ++w) {
        const double hi = t0 + (w + 1) * width;
        double peak = -1.0, peak_t = 0.0;
        while (i < t.size() && (t[i] <= hi || w == kWindows - 1)) {
            if (e[i] > peak) {
                peak = e[i];
                peak_t = t[i];
            }
            ++i;
        }
        if (peak >= 0.0) {
            tp.push_back(peak_t);
            ep.push_back(peak);
        }
    }
}

inline LogSlopeFit fit_log_slope(const std::vector<double>& t_raw,
                                 const std::vector<double>& e_raw) {
    LogSlopeFit fit;
    std::vector<double> tp, ep;
    window_peaks(t_raw, e_raw, tp, ep);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        if (ep[i] > 0.0) {
            xs.push_back(tp[i]);
            ys.push_back(std::log(ep[i]));
        }
    }
    fit.points = static_cast<int>(xs.size());
    if (fit.points < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < fit.points; ++i) {
        sx += xs[static_cast<std::size_t>(i)];
        sy += ys[static_cast<std::size_t>(i)];
        sxx += xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];
        sxy += xs[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(i)];
        syy += ys[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(i)];
    }
    const double n = fit.points;
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        const double r = ys[static_cast<std::size_t>(i)] - fit.slope * xs[static_cast<std::size_t>(i)] -
                         fit.intercept;
        ss_res += r * r;
    }
    // A degenerate (constant) peak series carries no trend to explain.
    fit.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 0.0;
    return fit;
}

}  // namespace detail

/// Computes the full RunReport over a recorded trajectory. The tail window
/// is the last tail_fraction of samples (default half), where transients
/// before the averaging regime no longer dominate.
inline RunReport analyze(const SwarmTrajectory& traj, const CostModel& c, const GrowthFn& g,
                         double tail_fraction = 0.5, double c_exponent = 0.0) {
    if (traj.size() == 0) {
        throw std::invalid_argument("analyze: empty trajectory");
    }
    const int n = traj.n_agents;
    const int d = traj.dim;
    const std::size_t samples = traj.size();
    const std::size_t tail_start =
        static_cast<std::size_t>(static_cast<double>(samples) * (1.0 - tail_fraction));

    RunReport rep;
    rep.times = traj.times;
    rep.agent_errors.reserve(samples);

    Eigen::VectorXd z_sum0 = Eigen::VectorXd::Zero(d);
    std::vector<double> tail_t, tail_e;
    for (std::size_t s = 0; s < samples; ++s) {
        const SwarmState& st = traj.states[s];
        const Eigen::VectorXd xstar = c.optimum(st.t);

        Eigen::VectorXd err(n);
        for (int j = 0; j < n; ++j) {
            err(j) = (st.x.segment(j * d, d) - xstar).norm();
        }
        rep.agent_errors.push_back(err);
        const double emax = err.maxCoeff();

        Eigen::VectorXd z_sum = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < n; ++j) z_sum += st.z.segment(j * d, d);
        if (s == 0) {
            z_sum0 = z_sum;
        }
        rep.invariant_drift =
            std::max(rep.invariant_drift, (z_sum - z_sum0).cwiseAbs().maxCoeff());

        const double dt_fd = 1e-4 * std::max(1.0, std::abs(st.t));
        const Eigen::VectorXd xdot =
            (c.optimum(st.t + dt_fd) - c.optimum(st.t - dt_fd)) / (2.0 * dt_fd);
        rep.assumption2_ratio = std::max(
            rep.assumption2_ratio, xdot.norm() / std::pow(g.value(st.t), c_exponent));

        if (s >= tail_start) {
            rep.rate_sup = std::max(rep.rate_sup, g.value(st.t) * emax);
            tail_t.push_back(st.t);
            tail_e.push_back(emax);
            double spread = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    spread = std::max(spread, (st.x.segment(i * d, d) -
                                               st.x.segment(j * d, d))
                                                  .norm());
                }
            }
            rep.consensus_spread = std::max(rep.consensus_spread, spread);
        }
        if (s + 1 == samples) {
            rep.final_error = emax;
        }
    }
    rep.tail_fit = detail::fit_log_slope(tail_t, tail_e);
    return rep;
}

/// Sup-norm gap between the full probed trajectory and the reconstructed
/// averaged trajectory, for each probing frequency in `omegas`. Both systems
/// integrate on the identical step sequence, so samples align in time.
inline std::vector<double> averaging_gap(const EsConfig& cfg, const CostModel& c,
                                         const Eigen::MatrixXd& L_expanded,
                                         const SwarmState& s0, double t_end,
                                         const std::vector<double>& omegas,
                                         const StepPolicy& policy) {
    if (cfg.probing != Probing::ConstantFrequency) {
        throw std::invalid_argument("averaging_gap: constant-frequency probing only");
    }
    std::vector<double> gaps;
    gaps.reserve(omegas.size());
    if (t_end <= s0.t) {
        // Degenerate window: the mapped initial conditions coincide.
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const SwarmState a0 = to_averaged_coords(s0, cfg, c);
            gaps.push_back((s0.x - from_averaged_x(a0, cfg, c)).norm());
        }
        return gaps;
    }
    for (double w : omegas) {
        EsConfig cw = cfg;
        cw.omega = w;
        const SwarmTrajectory full = simulate(
            [&](const SwarmState& s) { return rhs_constant_freq(s, cw, c, L_expanded); },
            s0, t_end, cw, policy);
        const SwarmState a0 = to_averaged_coords(s0, cw, c);
        const SwarmTrajectory avg = simulate(
            [&](const SwarmState& s) { return rhs_averaged(s, cw, c, L_expanded); }, a0,
            t_end, cw, policy);
        if (full.size() != avg.size()) {
            throw std::runtime_error("averaging_gap: trajectories lost sample alignment");
        }
        double gap = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i) {
            const Eigen::VectorXd x_avg = from_averaged_x(avg.states[i], cw, c);
            gap = std::max(gap, (full.states[i].x - x_avg).norm());
        }
        gaps.push_back(gap);
    }
    return gaps;
}

}  // namespace ues
