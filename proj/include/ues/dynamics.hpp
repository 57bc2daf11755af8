#pragma once

// Right-hand sides of the three continuous-time systems: the
// constant-frequency seeking network, the chirpy-probing variant, and the
// averaged system used as a validation oracle. The seeking RHS functions
// query costs exclusively through the measurement-only ValueView.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ues/costs.hpp"
#include "ues/growth.hpp"

namespace ues {

enum class Probing { ConstantFrequency, Chirpy };

/// Gains, probing frequencies and growth selection for both algorithms.
/// Frequencies are omega_i = omega * omega_hat[i] with pairwise distinct
/// naturals omega_hat; the chirp exponent q and the growth kind fix the
/// derived couplings p and rho.
struct EsConfig {
    double alpha = 1.0;
    double k = 1.0;
    double gamma = 1.0;
    double omega_h = 8.0;
    double omega = 10.0;
    std::vector<int> omega_hat;  // defaults to (1, 2, ..., d)
    GrowthFn growth;
    int q = 2;
    Probing probing = Probing::ConstantFrequency;

    void validate(int dim) const {
        if (!(alpha > 0.0) || !(k > 0.0) || !(gamma > 0.0) || !(omega_h > 0.0) ||
            !(omega > 0.0)) {
            throw std::invalid_argument("EsConfig: gains alpha, k, gamma, omega_h, omega "
                                        "must be positive");
        }
        const auto hats = omega_hats(dim);
        for (std::size_t i = 0; i < hats.size(); ++i) {
            if (hats[i] < 1) {
                throw std::invalid_argument("EsConfig: omega_hat entries must be naturals");
            }
            for (std::size_t j = i + 1; j < hats.size(); ++j) {
                if (hats[i] == hats[j]) {
                    throw std::invalid_argument(
                        "EsConfig: omega_hat entries must be pairwise distinct");
                }
            }
        }
        growth.validate();
        if (probing == Probing::Chirpy) {
            if (q < 2) {
                throw std::invalid_argument("EsConfig: chirpy probing needs q >= 2");
            }
            if (growth.kind == GrowthKind::Classical) {
                throw std::invalid_argument(
                    "EsConfig: chirpy probing needs a growing gain function");
            }
        }
    }

    [[nodiscard]] std::vector<int> omega_hats(int dim) const {
        if (!omega_hat.empty()) {
            if (static_cast<int>(omega_hat.size()) != dim) {
                throw std::invalid_argument("EsConfig: omega_hat must have one entry per dim");
            }
            return omega_hat;
        }
        std::vector<int> hats(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) hats[static_cast<std::size_t>(i)] = i + 1;
        return hats;
    }

    [[nodiscard]] double omega_i(int i, int dim) const {
        return omega * omega_hats(dim)[static_cast<std::size_t>(i)];
    }

    /// Probe-gain exponent p: q-v-1, q-1, or q+varrho-1 by growth kind.
    [[nodiscard]] double p() const {
        switch (growth.kind) {
            case GrowthKind::Asymptotic: return q - growth.v - 1.0;
            case GrowthKind::Exponential: return q - 1.0;
            case GrowthKind::PrescribedTime: return q + growth.varrho - 1.0;
            case GrowthKind::Classical: break;
        }
        throw std::invalid_argument("EsConfig: p is defined only for chirpy growth kinds");
    }

    /// Dilation coefficient rho: v/(beta q), 1/(lambda q), or varrho T / q.
    [[nodiscard]] double rho() const {
        switch (growth.kind) {
            case GrowthKind::Asymptotic: return growth.v / (growth.beta * q);
            case GrowthKind::Exponential: return 1.0 / (growth.lambda * q);
            case GrowthKind::PrescribedTime: return growth.varrho * growth.T / q;
            case GrowthKind::Classical: break;
        }
        throw std::invalid_argument("EsConfig: rho is defined only for chirpy growth kinds");
    }
};

/// Concatenated network state: agent estimates x (N*d), high-pass filter
/// states eta (N), integral coordination states z (N*d), at time t.
struct SwarmState {
    Eigen::VectorXd x;
    Eigen::VectorXd eta;
    Eigen::VectorXd z;
    double t = 0.0;

    [[nodiscard]] int n_agents() const { return static_cast<int>(eta.size()); }
    [[nodiscard]] int dim() const {
        return n_agents() == 0 ? 0 : static_cast<int>(x.size()) / n_agents();
    }
};

struct SwarmDeriv {
    Eigen::VectorXd dx;
    Eigen::VectorXd deta;
    Eigen::VectorXd dz;
};

inline Eigen::VectorXd pack_state(const SwarmState& s) {
    Eigen::VectorXd y(s.x.size() + s.eta.size() + s.z.size());
    y << s.x, s.eta, s.z;
    return y;
}

inline SwarmState unpack_state(const Eigen::VectorXd& y, int n_agents, int dim, double t) {
    const int nd = n_agents * dim;
    SwarmState s;
    s.x = y.segment(0, nd);
    s.eta = y.segment(nd, n_agents);
    s.z = y.segment(nd + n_agents, nd);
    s.t = t;
    return s;
}

inline Eigen::VectorXd pack_deriv(const SwarmDeriv& d) {
    Eigen::VectorXd y(d.dx.size() + d.deta.size() + d.dz.size());
    y << d.dx, d.deta, d.dz;
    return y;
}

namespace detail {

inline void check_dims(const SwarmState& s, const Eigen::MatrixXd& L_expanded) {
    const int nd = s.n_agents() * s.dim();
    if (static_cast<int>(s.x.size()) != nd || static_cast<int>(s.z.size()) != nd ||
        s.dim() * s.n_agents() != static_cast<int>(s.x.size())) {
        throw std::invalid_argument("SwarmState: inconsistent dimensions");
    }
    if (L_expanded.rows() != nd || L_expanded.cols() != nd) {
        throw std::invalid_argument(
            "rhs: expanded Laplacian must be (N*d) x (N*d); got " +
            std::to_string(L_expanded.rows()) + " rows for N*d = " + std::to_string(nd));
    }
}

inline Eigen::VectorXd measure_all(const ValueView& cost, const SwarmState& s) {
    const int n = s.n_agents();
    const int d = s.dim();
    Eigen::VectorXd h(n);
    for (int j = 0; j < n; ++j) {
        h(j) = cost(j, s.x.segment(j * d, d), s.t);
    }
    return h;
}

}  // namespace detail

/// Time dilation tau(t) = t0 + rho (phi^q(t) - 1) driving the chirpy probe
/// phase. Past the clamp the gain freezes, so tau continues linearly at the
/// frozen instantaneous rate phi_c^{p+1}: the probe keeps oscillating at a
/// constant frequency instead of stalling.
inline double chirp_tau(const EsConfig& cfg, double t) {
    const GrowthFn& g = cfg.growth;
    const double rho = cfg.rho();
    if (g.clamp_time && t > *g.clamp_time) {
        const double tc = *g.clamp_time;
        const double phic = g.value(tc);
        const double tau_c = g.t0 + rho * (std::pow(phic, cfg.q) - 1.0);
        return tau_c + std::pow(phic, cfg.p() + 1.0) * (t - tc);
    }
    return g.t0 + rho * (std::pow(g.value(t), cfg.q) - 1.0);
}

/// Probe phase omega_i * tau(t) for dimension index i (0-based).
inline double chirp_phase(const EsConfig& cfg, int i, double t, int dim) {
    return cfg.omega_i(i, dim) * chirp_tau(cfg, t);
}

/// Constant-frequency seeking network:
///   dx   = sum_i xi^-1 sqrt(alpha w_i) cos(w_i t + k xi (h - eta)) (x) e_i
///           - L x - z xi^-1
///   deta = -w_h eta + w_h h(x, t)
///   dz   = gamma xi L x
inline SwarmDeriv rhs_constant_freq(const SwarmState& s, const EsConfig& cfg,
                                    const ValueView& cost,
                                    const Eigen::MatrixXd& L_expanded) {
    if (cfg.growth.kind != GrowthKind::Classical &&
        cfg.growth.kind != GrowthKind::Asymptotic) {
        throw std::invalid_argument(
            "rhs_constant_freq: growth kind must be classical or asymptotic");
    }
    detail::check_dims(s, L_expanded);
    const int n = s.n_agents();
    const int d = s.dim();

    const double xi = cfg.growth.value(s.t);
    const Eigen::VectorXd h = detail::measure_all(cost, s);
    const Eigen::VectorXd Lx = L_expanded * s.x;

    SwarmDeriv deriv;
    deriv.dx = -Lx - s.z / xi;
    for (int i = 0; i < d; ++i) {
        const double wi = cfg.omega_i(i, d);
        const double amp = std::sqrt(cfg.alpha * wi) / xi;
        for (int j = 0; j < n; ++j) {
            const double arg = wi * s.t + cfg.k * xi * (h(j) - s.eta(j));
            deriv.dx(j * d + i) += amp * std::cos(arg);
        }
    }
    deriv.deta = cfg.omega_h * (h - s.eta);
    deriv.dz = cfg.gamma * xi * Lx;
    return deriv;
}

/// Chirpy-probing variant:
///   dx   = phi^p sum_i sqrt(alpha w_i) cos(w_i tau(t) + k phi (h - eta)) (x) e_i
///           - phi^{p+1} L x - phi^p z
///   deta = (-w_h eta + w_h h) phi^{p+1}
///   dz   = gamma phi^{p+2} L x
inline SwarmDeriv rhs_chirpy(const SwarmState& s, const EsConfig& cfg, const ValueView& cost,
                             const Eigen::MatrixXd& L_expanded) {
    if (cfg.growth.kind == GrowthKind::Classical) {
        throw std::invalid_argument("rhs_chirpy: growth kind must be non-classical");
    }
    if (cfg.q < 2) {
        throw std::invalid_argument("rhs_chirpy: chirp exponent q must be >= 2");
    }
    detail::check_dims(s, L_expanded);
    const int n = s.n_agents();
    const int d = s.dim();

    const double phi = cfg.growth.value(s.t);
    const double p = cfg.p();
    const double phi_p = std::pow(phi, p);
    const double phi_p1 = std::pow(phi, p + 1.0);
    const double phi_p2 = std::pow(phi, p + 2.0);
    const double tau = chirp_tau(cfg, s.t);

    const Eigen::VectorXd h = detail::measure_all(cost, s);
    const Eigen::VectorXd Lx = L_expanded * s.x;

    SwarmDeriv deriv;
    deriv.dx = -phi_p1 * Lx - phi_p * s.z;
    for (int i = 0; i < d; ++i) {
        const double wi = cfg.omega_i(i, d);
        const double amp = phi_p * std::sqrt(cfg.alpha * wi);
        for (int j = 0; j < n; ++j) {
            const double arg = wi * tau + cfg.k * phi * (h(j) - s.eta(j));
            deriv.dx(j * d + i) += amp * std::cos(arg);
        }
    }
    deriv.deta = cfg.omega_h * (h - s.eta) * phi_p1;
    deriv.dz = cfg.gamma * phi_p2 * Lx;
    return deriv;
}

/// Scaled error coordinates: x_f = phi(t)(x - 1 (x) x*(t)),
/// eta_f = phi(t)(eta - h(1 (x) x*, t)).
struct ErrorCoords {
    Eigen::VectorXd x_f;
    Eigen::VectorXd eta_f;
};

inline ErrorCoords error_coords(const SwarmState& s, const CostModel& c, const GrowthFn& g) {
    const int n = s.n_agents();
    const int d = s.dim();
    const double phi = g.value(s.t);
    const Eigen::VectorXd xstar = c.optimum(s.t);

    ErrorCoords ec;
    ec.x_f.resize(n * d);
    ec.eta_f.resize(n);
    for (int j = 0; j < n; ++j) {
        ec.x_f.segment(j * d, d) = phi * (s.x.segment(j * d, d) - xstar);
        ec.eta_f(j) = phi * (s.eta(j) - c.value(j, xstar, s.t));
    }
    return ec;
}

namespace detail {

/// Stacked per-agent gradients evaluated blockwise: col_j grad f_j(x_j, t).
inline Eigen::VectorXd stacked_grad(const CostModel& c, const Eigen::VectorXd& x_stacked,
                                    double t) {
    const int n = c.n_agents();
    const int d = c.dim();
    Eigen::VectorXd g(n * d);
    for (int j = 0; j < n; ++j) {
        g.segment(j * d, d) = c.grad(j, x_stacked.segment(j * d, d), t);
    }
    return g;
}

/// z*(t) = -(alpha k / 2) col_j grad f_j(x*(t), t).
inline Eigen::VectorXd z_star(const CostModel& c, const Eigen::VectorXd& xstar, double t,
                              double alpha, double k) {
    const int n = c.n_agents();
    const int d = c.dim();
    Eigen::VectorXd z(n * d);
    for (int j = 0; j < n; ++j) {
        z.segment(j * d, d) = c.grad(j, xstar, t);
    }
    return -0.5 * alpha * k * z;
}

}  // namespace detail

/// Averaged validation system in the scaled error coordinates
/// (x_f, eta_f, z_f); requires gradient and optimum oracles. The time
/// derivatives of x*(t), z*(t) and h(1 (x) x*, t) are central finite
/// differences with step 1e-4 (relative-scaled).
inline SwarmDeriv rhs_averaged(const SwarmState& s, const EsConfig& cfg, const CostModel& c,
                               const Eigen::MatrixXd& L_expanded) {
    if (cfg.growth.kind != GrowthKind::Classical &&
        cfg.growth.kind != GrowthKind::Asymptotic) {
        throw std::invalid_argument(
            "rhs_averaged: growth kind must be classical or asymptotic");
    }
    if (!c.has_grad()) {
        throw std::runtime_error("rhs_averaged: cost model has no gradient oracle");
    }
    detail::check_dims(s, L_expanded);
    const int n = s.n_agents();
    const int d = s.dim();
    const double t = s.t;

    const double xi = cfg.growth.value(t);
    const double ratio = cfg.growth.log_derivative(t);  // (beta/v) xi^-v
    const double dt_fd = 1e-4 * std::max(1.0, std::abs(t));

    const Eigen::VectorXd xstar = c.optimum(t);
    const Eigen::VectorXd xstar_p = c.optimum(t + dt_fd);
    const Eigen::VectorXd xstar_m = c.optimum(t - dt_fd);
    const Eigen::VectorXd xstar_dot = (xstar_p - xstar_m) / (2.0 * dt_fd);

    const Eigen::VectorXd zs = detail::z_star(c, xstar, t, cfg.alpha, cfg.k);
    const Eigen::VectorXd zs_p = detail::z_star(c, xstar_p, t + dt_fd, cfg.alpha, cfg.k);
    const Eigen::VectorXd zs_m = detail::z_star(c, xstar_m, t - dt_fd, cfg.alpha, cfg.k);
    Eigen::VectorXd zs_dot = (zs_p - zs_m) / (2.0 * dt_fd);
    // sum_j grad f_j(x*(t), t) vanishes identically, so dz*/dt has zero
    // agent-sum per dimension; enforce it on the finite-difference estimate.
    for (int kdim = 0; kdim < d; ++kdim) {
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += zs_dot(j * d + kdim);
        mean /= n;
        for (int j = 0; j < n; ++j) zs_dot(j * d + kdim) -= mean;
    }

    // Reconstructed absolute estimates x_bar = xi^-1 x_f + 1 (x) x*.
    Eigen::VectorXd xbar(n * d);
    for (int j = 0; j < n; ++j) {
        xbar.segment(j * d, d) = s.x.segment(j * d, d) / xi + xstar;
    }
    const Eigen::VectorXd G = detail::stacked_grad(c, xbar, t);

    SwarmDeriv deriv;
    deriv.dx = ratio * s.x - 0.5 * cfg.alpha * cfg.k * G - L_expanded * s.x - s.z - zs;
    for (int j = 0; j < n; ++j) {
        deriv.dx.segment(j * d, d) -= xi * xstar_dot;
    }

    deriv.deta.resize(n);
    for (int j = 0; j < n; ++j) {
        const double h_f = c.value(j, xbar.segment(j * d, d), t) - c.value(j, xstar, t);
        const double hstar_dot = (c.value(j, xstar_p, t + dt_fd) -
                                  c.value(j, xstar_m, t - dt_fd)) /
                                 (2.0 * dt_fd);
        deriv.deta(j) = (ratio - cfg.omega_h) * s.eta(j) + cfg.omega_h * xi * h_f -
                        xi * hstar_dot;
    }

    deriv.dz = cfg.gamma * (L_expanded * s.x) - zs_dot;
    return deriv;
}

/// Maps a full-system state into the averaged system's error coordinates.
inline SwarmState to_averaged_coords(const SwarmState& s, const EsConfig& cfg,
                                     const CostModel& c) {
    const ErrorCoords ec = error_coords(s, c, cfg.growth);
    SwarmState a;
    a.x = ec.x_f;
    a.eta = ec.eta_f;
    a.z = s.z - detail::z_star(c, c.optimum(s.t), s.t, cfg.alpha, cfg.k);
    a.t = s.t;
    return a;
}

/// Reconstructs absolute agent estimates from an averaged-coordinates state.
inline Eigen::VectorXd from_averaged_x(const SwarmState& a, const EsConfig& cfg,
                                       const CostModel& c) {
    const int n = a.n_agents();
    const int d = a.dim();
    const double xi = cfg.growth.value(a.t);
    const Eigen::VectorXd xstar = c.optimum(a.t);
    Eigen::VectorXd x(n * d);
    for (int j = 0; j < n; ++j) {
        x.segment(j * d, d) = a.x.segment(j * d, d) / xi + xstar;
    }
    return x;
}

}  // namespace ues
