#pragma once

// Per-agent time-varying cost models. The seeking algorithms may only query
// values; the gradient / Hessian / optimum oracles exist for validation and
// post-hoc metrics. All oracles are pure functions of (agent, x, t).

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ues/eig.hpp"

namespace ues {

enum class CostFamily { QuadSinSq, ShiftedQuadratic, Custom };

/// fi(x, t) for a network of agents, d-dimensional decision variable.
///
/// Families:
///  - QuadSinSq:        fi(x) = sum_k (x_k - c_i)^2 + sin^2(x_k - c_i)
///  - ShiftedQuadratic: fi(x, t) = sum_k (x_k - a_i sin(b_i t))^2
///  - Custom:           user-supplied value, optional gradient/Hessian
class CostModel {
public:
    using ValueFn = std::function<double(int, const Eigen::VectorXd&, double)>;
    using GradFn = std::function<Eigen::VectorXd(int, const Eigen::VectorXd&, double)>;
    using HessFn = std::function<Eigen::MatrixXd(int, const Eigen::VectorXd&, double)>;

    static CostModel quad_sin_sq(int n_agents, int dim, Eigen::VectorXd centers) {
        if (centers.size() != n_agents) {
            throw std::invalid_argument("CostModel: need one center per agent");
        }
        CostModel m(CostFamily::QuadSinSq, n_agents, dim);
        m.centers_ = std::move(centers);
        return m;
    }

    static CostModel shifted_quadratic(int n_agents, int dim, Eigen::VectorXd amplitudes,
                                       Eigen::VectorXd rates) {
        if (amplitudes.size() != n_agents || rates.size() != n_agents) {
            throw std::invalid_argument(
                "CostModel: need one amplitude and one rate per agent");
        }
        CostModel m(CostFamily::ShiftedQuadratic, n_agents, dim);
        m.amplitudes_ = std::move(amplitudes);
        m.rates_ = std::move(rates);
        return m;
    }

    static CostModel custom(int n_agents, int dim, ValueFn value, GradFn grad = nullptr,
                            HessFn hess = nullptr) {
        if (!value) {
            throw std::invalid_argument("CostModel: custom family requires a value oracle");
        }
        CostModel m(CostFamily::Custom, n_agents, dim);
        m.custom_value_ = std::move(value);
        m.custom_grad_ = std::move(grad);
        m.custom_hess_ = std::move(hess);
        return m;
    }

    [[nodiscard]] CostFamily family() const { return family_; }
    [[nodiscard]] int n_agents() const { return n_agents_; }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Eigen::VectorXd& centers() const { return centers_; }
    [[nodiscard]] const Eigen::VectorXd& amplitudes() const { return amplitudes_; }
    [[nodiscard]] const Eigen::VectorXd& rates() const { return rates_; }

    [[nodiscard]] bool has_grad() const {
        return family_ != CostFamily::Custom || static_cast<bool>(custom_grad_);
    }
    [[nodiscard]] bool has_hessian() const {
        return family_ != CostFamily::Custom || static_cast<bool>(custom_hess_);
    }

    /// fi(x, t). The only cost access the seeking algorithms are allowed.
    [[nodiscard]] double value(int agent, const Eigen::VectorXd& x, double t) const {
        check_agent(agent);
        switch (family_) {
            case CostFamily::QuadSinSq: {
                double s = 0.0;
                for (int k = 0; k < dim_; ++k) {
                    const double u = x(k) - centers_(agent);
                    const double su = std::sin(u);
                    s += u * u + su * su;
                }
                return s;
            }
            case CostFamily::ShiftedQuadratic: {
                const double mu = amplitudes_(agent) * std::sin(rates_(agent) * t);
                double s = 0.0;
                for (int k = 0; k < dim_; ++k) {
                    const double u = x(k) - mu;
                    s += u * u;
                }
                return s;
            }
            case CostFamily::Custom:
                return custom_value_(agent, x, t);
        }
        throw std::logic_error("CostModel: unreachable");
    }

    /// Analytic gradient of fi; validation-facing.
    [[nodiscard]] Eigen::VectorXd grad(int agent, const Eigen::VectorXd& x, double t) const {
        check_agent(agent);
        switch (family_) {
            case CostFamily::QuadSinSq: {
                Eigen::VectorXd g(dim_);
                for (int k = 0; k < dim_; ++k) {
                    const double u = x(k) - centers_(agent);
                    g(k) = 2.0 * u + std::sin(2.0 * u);
                }
                return g;
            }
            case CostFamily::ShiftedQuadratic: {
                const double mu = amplitudes_(agent) * std::sin(rates_(agent) * t);
                return 2.0 * (x.array() - mu).matrix();
            }
            case CostFamily::Custom:
                if (!custom_grad_) {
                    throw std::runtime_error(
                        "CostModel: custom family has no gradient oracle");
                }
                return custom_grad_(agent, x, t);
        }
        throw std::logic_error("CostModel: unreachable");
    }

    /// Analytic Hessian of fi; validation-facing.
    [[nodiscard]] Eigen::MatrixXd hessian(int agent, const Eigen::VectorXd& x, double t) const {
        check_agent(agent);
        switch (family_) {
            case CostFamily::QuadSinSq: {
                Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
                for (int k = 0; k < dim_; ++k) {
                    const double u = x(k) - centers_(agent);
                    h(k, k) = 2.0 + 2.0 * std::cos(2.0 * u);
                }
                return h;
            }
            case CostFamily::ShiftedQuadratic:
                return 2.0 * Eigen::MatrixXd::Identity(dim_, dim_);
            case CostFamily::Custom:
                if (!custom_hess_) {
                    throw std::runtime_error(
                        "CostModel: custom family has no Hessian oracle");
                }
                return custom_hess_(agent, x, t);
        }
        throw std::logic_error("CostModel: unreachable");
    }

    /// Gradient of the network objective sum_i fi at x.
    [[nodiscard]] Eigen::VectorXd sum_grad(const Eigen::VectorXd& x, double t) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
        for (int i = 0; i < n_agents_; ++i) g += grad(i, x, t);
        return g;
    }

    /// Minimizer x*(t) of sum_i fi(., t), by damped Newton on the summed
    /// gradient with a bisection fallback for d = 1. Converges to
    /// ||sum grad|| <= 1e-10 or throws (a failure here signals a cost model
    /// that is not strictly convex).
    [[nodiscard]] Eigen::VectorXd optimum(double t) const {
        if (!has_grad()) {
            throw std::runtime_error("CostModel: optimum requires a gradient oracle");
        }
        Eigen::VectorXd x = initial_guess(t);
        double fn = sum_grad(x, t).norm();
        for (int iter = 0; iter < 100 && fn > 1e-13; ++iter) {
            const Eigen::VectorXd F = sum_grad(x, t);
            const Eigen::MatrixXd J = sum_hessian_or_fd(x, t);
            Eigen::VectorXd step = J.fullPivLu().solve(-F);
            if (!step.allFinite()) step = -F;  // gradient fallback
            double lambda = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 40; ++bt) {
                const Eigen::VectorXd xn = x + lambda * step;
                const double fnn = sum_grad(xn, t).norm();
                if (fnn < fn) {
                    x = xn;
                    fn = fnn;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!improved) {
                if (dim_ == 1) {
                    x = bisect_1d(t);
                    fn = sum_grad(x, t).norm();
                }
                break;
            }
        }
        if (fn > 1e-10) {
            throw std::runtime_error(
                "CostModel: optimum search did not converge (residual " +
                std::to_string(fn) + "); strict convexity of the sum is suspect");
        }
        return x;
    }

private:
    CostModel(CostFamily f, int n, int d) : family_(f), n_agents_(n), dim_(d) {
        if (n < 1 || d < 1) {
            throw std::invalid_argument("CostModel: need n_agents >= 1 and dim >= 1");
        }
    }

    void check_agent(int agent) const {
        if (agent < 0 || agent >= n_agents_) {
            throw std::out_of_range("CostModel: agent index " + std::to_string(agent) +
                                    " out of range [0, " + std::to_string(n_agents_) + ")");
        }
    }

    [[nodiscard]] Eigen::VectorXd initial_guess(double t) const {
        switch (family_) {
            case CostFamily::QuadSinSq:
                return Eigen::VectorXd::Constant(dim_, centers_.mean());
            case CostFamily::ShiftedQuadratic: {
                double mu = 0.0;
                for (int i = 0; i < n_agents_; ++i) {
                    mu += amplitudes_(i) * std::sin(rates_(i) * t);
                }
                return Eigen::VectorXd::Constant(dim_, mu / n_agents_);
            }
            case CostFamily::Custom:
                return Eigen::VectorXd::Zero(dim_);
        }
        throw std::logic_error("CostModel: unreachable");
    }

    [[nodiscard]] Eigen::MatrixXd sum_hessian_or_fd(const Eigen::VectorXd& x, double t) const {
        if (has_hessian()) {
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim_, dim_);
            for (int i = 0; i < n_agents_; ++i) J += hessian(i, x, t);
            return J;
        }
        const double h = 1e-6 * std::max(1.0, x.norm());
        Eigen::MatrixXd J(dim_, dim_);
        for (int k = 0; k < dim_; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            J.col(k) = (sum_grad(xp, t) - sum_grad(xm, t)) / (2.0 * h);
        }
        return J;
    }

    /// Scalar root of the summed gradient via bracket expansion + bisection.
    [[nodiscard]] Eigen::VectorXd bisect_1d(double t) const {
        auto F = [&](double x) {
            return sum_grad(Eigen::VectorXd::Constant(1, x), t)(0);
        };
        double lo = -1.0, hi = 1.0;
        for (int k = 0; k < 120 && F(lo) > 0.0; ++k) lo *= 2.0;
        for (int k = 0; k < 120 && F(hi) < 0.0; ++k) hi *= 2.0;
        if (F(lo) > 0.0 || F(hi) < 0.0) {
            throw std::runtime_error("CostModel: bisection failed to bracket the optimum");
        }
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (F(mid) <= 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
        }
        return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
    }

    CostFamily family_;
    int n_agents_;
    int dim_;
    Eigen::VectorXd centers_;     // QuadSinSq
    Eigen::VectorXd amplitudes_;  // ShiftedQuadratic
    Eigen::VectorXd rates_;       // ShiftedQuadratic
    ValueFn custom_value_;
    GradFn custom_grad_;
    HessFn custom_hess_;
};

/// Measurement-only view handed to the seeking algorithms; by construction
/// they cannot reach the gradient or optimum oracles through it.
class ValueView {
public:
    ValueView(const CostModel& m) : model_(&m) {}  // NOLINT: implicit by design

    [[nodiscard]] double operator()(int agent, const Eigen::VectorXd& x, double t) const {
        return model_->value(agent, x, t);
    }
    [[nodiscard]] int n_agents() const { return model_->n_agents(); }
    [[nodiscard]] int dim() const { return model_->dim(); }

private:
    const CostModel* model_;
};

/// Strong-convexity modulus and gradient Lipschitz constant per agent;
/// the certificate uses the network-wide m = min{m_i}, M = max{M_i}.
struct ConvexityBounds {
    Eigen::VectorXd m_agent;
    Eigen::VectorXd M_agent;

    [[nodiscard]] double m() const { return m_agent.minCoeff(); }
    [[nodiscard]] double M() const { return M_agent.maxCoeff(); }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Curvature bounds over a box. Analytic where the family permits
/// (ShiftedQuadratic: m = M = 2; QuadSinSq: M = 4 with m sampled), otherwise
/// a grid sample of Hessian eigenvalues with >= 101 points per dimension.
/// Sampling is a documented heuristic, not a certified bound.
inline ConvexityBounds convexity_bounds(const CostModel& c, const std::vector<Interval>& box,
                                        int grid_per_dim = 101) {
    const int n = c.n_agents();
    const int d = c.dim();
    if (static_cast<int>(box.size()) != d) {
        throw std::invalid_argument("convexity_bounds: box must have one interval per dim");
    }
    for (const auto& iv : box) {
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || iv.hi < iv.lo) {
            throw std::invalid_argument("convexity_bounds: box must be finite with lo <= hi");
        }
    }
    grid_per_dim = std::max(grid_per_dim, 101);

    ConvexityBounds b;
    b.m_agent.resize(n);
    b.M_agent.resize(n);

    if (c.family() == CostFamily::ShiftedQuadratic) {
        b.m_agent.setConstant(2.0);
        b.M_agent.setConstant(2.0);
        return b;
    }

    if (c.family() == CostFamily::QuadSinSq) {
        // Diagonal Hessian with entries 2 + 2 cos(2u), u = x_k - c_i; the
        // upper bound 4 is exact, the lower bound is sampled per dimension.
        for (int i = 0; i < n; ++i) {
            double mi = 4.0;
            for (int k = 0; k < d; ++k) {
                for (int g = 0; g < grid_per_dim; ++g) {
                    const double x = box[static_cast<std::size_t>(k)].lo +
                                     (box[static_cast<std::size_t>(k)].hi -
                                      box[static_cast<std::size_t>(k)].lo) *
                                         g / (grid_per_dim - 1.0);
                    const double u = x - c.centers()(i);
                    mi = std::min(mi, 2.0 + 2.0 * std::cos(2.0 * u));
                }
            }
            b.m_agent(i) = mi;
            b.M_agent(i) = 4.0;
        }
        return b;
    }

    // Custom: sample the product grid and take Hessian eigenvalue extremes.
    if (!c.has_hessian() && !c.has_grad()) {
        throw std::runtime_error(
            "convexity_bounds: custom family needs a gradient or Hessian oracle");
    }
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    b.m_agent.setConstant(std::numeric_limits<double>::infinity());
    b.M_agent.setConstant(-std::numeric_limits<double>::infinity());
    const double t_sample = 0.0;
    while (true) {
        Eigen::VectorXd x(d);
        for (int k = 0; k < d; ++k) {
            const auto& iv = box[static_cast<std::size_t>(k)];
            x(k) = iv.lo + (iv.hi - iv.lo) * idx[static_cast<std::size_t>(k)] /
                               (grid_per_dim - 1.0);
        }
        for (int i = 0; i < n; ++i) {
            Eigen::MatrixXd H;
            if (c.has_hessian()) {
                H = c.hessian(i, x, t_sample);
            } else {
                const double h = 1e-5 * std::max(1.0, x.norm());
                H.resize(d, d);
                for (int k = 0; k < d; ++k) {
                    Eigen::VectorXd xp = x, xm = x;
                    xp(k) += h;
                    xm(k) -= h;
                    H.col(k) = (c.grad(i, xp, t_sample) - c.grad(i, xm, t_sample)) / (2.0 * h);
                }
            }
            const SymEig e = sym_eig(0.5 * (H + H.transpose()));
            b.m_agent(i) = std::min(b.m_agent(i), e.values(0));
            b.M_agent(i) = std::max(b.M_agent(i), e.values(e.values.size() - 1));
        }
        int k = 0;
        for (; k < d; ++k) {
            if (++idx[static_cast<std::size_t>(k)] < grid_per_dim) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
        if (k == d) break;
    }
    return b;
}

}  // namespace ues
