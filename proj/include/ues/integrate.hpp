#pragma once

// Fixed-step classic Runge-Kutta with a probing-frequency-aware step cap.
// Probing injects persistent high-frequency content that defeats adaptive
// error controllers, so the resolution knob is samples per probe period.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "ues/dynamics.hpp"

namespace ues {

struct StepPolicy {
    int samples_per_period = 40;
    double h_max = 0.1;
    double h_min = 1e-7;
    int record_stride = 1;

    void validate() const {
        if (samples_per_period < 8) {
            throw std::invalid_argument("StepPolicy: samples_per_period must be >= 8");
        }
        if (!(h_min > 0.0) || !(h_max >= h_min)) {
            throw std::invalid_argument("StepPolicy: need 0 < h_min <= h_max");
        }
        if (record_stride < 1) {
            throw std::invalid_argument("StepPolicy: record_stride must be >= 1");
        }
    }
};

/// Step size that resolves the fastest instantaneous probe frequency:
/// h = min(h_max, 2 pi / (w_inst * samples_per_period)), floored at h_min.
inline double step_cap(const EsConfig& cfg, int dim, double t, const StepPolicy& policy) {
    const auto hats = cfg.omega_hats(dim);
    int hat_max = 1;
    for (int h : hats) hat_max = std::max(hat_max, h);
    double w_inst = cfg.omega * hat_max;
    if (cfg.probing == Probing::Chirpy) {
        w_inst *= std::pow(cfg.growth.value(t), cfg.p() + 1.0);
    }
    const double h = std::min(policy.h_max, 2.0 * M_PI / (w_inst * policy.samples_per_period));
    if (h < policy.h_min) {
        static thread_local bool warned = false;
        if (!warned) {
            std::cerr << "ues: step cap " << h << " below h_min " << policy.h_min
                      << " at t = " << t << "; clamping\n";
            warned = true;
        }
        return policy.h_min;
    }
    return h;
}

struct IntegrationError : std::runtime_error {
    explicit IntegrationError(double at_time)
        : std::runtime_error("integration aborted: non-finite state at t = " +
                             std::to_string(at_time)),
          time(at_time) {}
    double time;
};

template <class Vec>
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] const Vec& back() const { return states.back(); }
};

namespace detail {

inline bool finite_state(double y) { return std::isfinite(y); }
inline bool finite_state(const Eigen::VectorXd& y) { return y.allFinite(); }

}  // namespace detail

/// Classic RK4 over [t0, t_end] with the step recomputed from `cap` each
/// step; the last step is shortened so the final state lands exactly at
/// t_end. Records every record_stride-th step plus the final state.
template <class Vec, class RhsFn, class CapFn>
Trajectory<Vec> integrate_rk4(RhsFn&& rhs, Vec y0, double t0, double t_end,
                              const StepPolicy& policy, CapFn&& cap) {
    policy.validate();
    if (!(t_end > t0)) {
        throw std::invalid_argument("integrate_rk4: t_end must exceed t0");
    }

    Trajectory<Vec> traj;
    traj.times.push_back(t0);
    traj.states.push_back(y0);

    double t = t0;
    Vec y = std::move(y0);
    long step_index = 0;
    while (t < t_end) {
        double h = std::min<double>(cap(t), policy.h_max);
        bool final_step = false;
        if (t + h >= t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
            h = t_end - t;
            final_step = true;
        }

        const Vec k1 = rhs(t, y);
        const Vec k2 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k1));
        const Vec k3 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k2));
        const Vec k4 = rhs(t + h, Vec(y + h * k3));
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = final_step ? t_end : t + h;
        ++step_index;

        if (!detail::finite_state(y)) {
            throw IntegrationError(t);
        }
        if (final_step || step_index % policy.record_stride == 0) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        }
    }
    return traj;
}

/// Network trajectory with the original (x, eta, z) layout plus the config
/// snapshot used to generate it.
struct SwarmTrajectory {
    std::vector<double> times;
    std::vector<SwarmState> states;
    EsConfig config;
    int n_agents = 0;
    int dim = 0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] const SwarmState& back() const { return states.back(); }
};

/// Integrates a swarm RHS (full or averaged system) from s0 to t_end with
/// the probing-aware step cap derived from cfg.
template <class SwarmRhs>
SwarmTrajectory simulate(SwarmRhs&& rhs, const SwarmState& s0, double t_end,
                         const EsConfig& cfg, const StepPolicy& policy) {
    const int n = s0.n_agents();
    const int d = s0.dim();
    if (cfg.growth.kind == GrowthKind::PrescribedTime && !cfg.growth.clamp_time &&
        t_end >= cfg.growth.t0 + cfg.growth.T) {
        throw std::invalid_argument(
            "simulate: prescribed-time gain is singular before t_end; set clamp_time");
    }

    auto packed_rhs = [&](double t, const Eigen::VectorXd& y) {
        const SwarmState s = unpack_state(y, n, d, t);
        return pack_deriv(rhs(s));
    };
    auto cap = [&](double t) { return step_cap(cfg, d, t, policy); };

    const Trajectory<Eigen::VectorXd> raw =
        integrate_rk4(packed_rhs, pack_state(s0), s0.t, t_end, policy, cap);

    SwarmTrajectory traj;
    traj.config = cfg;
    traj.n_agents = n;
    traj.dim = d;
    traj.times = raw.times;
    traj.states.reserve(raw.states.size());
    for (std::size_t i = 0; i < raw.states.size(); ++i) {
        traj.states.push_back(unpack_state(raw.states[i], n, d, raw.times[i]));
    }
    return traj;
}

}  // namespace ues
