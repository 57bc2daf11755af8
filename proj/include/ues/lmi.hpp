#pragma once

// Certificate machinery for the averaged system: construction of the
// definiteness blocks Phi_1 / Phi_2, feasibility checking by eigenvalues,
// a deterministic grid search over a scalar-parameterized certificate
// family, and the quadratic Lyapunov monitor.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ues/costs.hpp"
#include "ues/eig.hpp"
#include "ues/graph.hpp"

namespace ues {

/// Candidate certificate (p11, p22, delta, P2, P3). P3 must be symmetric;
/// the scalars must be positive for a valid candidate.
struct LmiCertificate {
    double p11 = 1.0;
    double p22 = 1.0;
    double delta = 1.0;
    Eigen::MatrixXd P2;  // (N-1) x (N-1), not necessarily symmetric
    Eigen::MatrixXd P3;  // (N-1) x (N-1), symmetric

    static LmiCertificate scalar(int n_agents, double p11, double p22, double s, double p3,
                                 double delta) {
        LmiCertificate c;
        c.p11 = p11;
        c.p22 = p22;
        c.delta = delta;
        c.P2 = s * Eigen::MatrixXd::Identity(n_agents - 1, n_agents - 1);
        c.P3 = p3 * Eigen::MatrixXd::Identity(n_agents - 1, n_agents - 1);
        return c;
    }

    void validate() const {
        if (!(p11 > 0.0) || !(p22 > 0.0) || !(delta > 0.0)) {
            throw std::invalid_argument("LmiCertificate: p11, p22, delta must be positive");
        }
        if (P2.rows() != P2.cols() || P3.rows() != P3.cols() || P2.rows() != P3.rows()) {
            throw std::invalid_argument("LmiCertificate: P2, P3 must be square, same size");
        }
        if ((P3 - P3.transpose()).norm() > 1e-9 * std::max(1.0, P3.norm())) {
            throw std::invalid_argument("LmiCertificate: P3 must be symmetric");
        }
    }
};

/// Fixed scenario rates entering the certificate blocks. rate_ratio is
/// beta/v for constant-frequency probing and 1/(q rho) for chirpy probing.
struct RateParams {
    double rate_ratio = 0.0;
    double alpha = 1.0;
    double k = 1.0;
    double gamma = 1.0;
};

/// Scenario metadata for the analytic side conditions, reported alongside
/// but independent of matrix feasibility.
struct SideConditions {
    bool chirpy = false;
    double v = 0.0;  // constant-frequency only
    double c = 0.0;  // declared growth-bound exponent
    double p = 0.0;  // chirpy only

    [[nodiscard]] bool rate_condition_ok() const { return chirpy ? p >= 2.0 : v >= 2.0; }
    [[nodiscard]] bool c_condition_ok() const { return chirpy ? (c - p < -2.0) : (c < -3.0); }
};

struct FeasibilityReport {
    double lmi1_min_eig = 0.0;
    double phi1_max_eig = 0.0;
    double phi2_max_eig = 0.0;
    bool feasible = false;
    std::optional<SideConditions> side;
};

struct PhiPair {
    Eigen::MatrixXd phi1;  // (2N-1) x (2N-1)
    Eigen::MatrixXd phi2;  // 3(N-1) x 3(N-1)
};

/// Assembles the certificate blocks for the given graph factorization,
/// curvature bounds and rates. Upper blocks are placed first and the result
/// is mirrored, so both matrices are exactly symmetric.
inline PhiPair build_phi(const LaplacianPair& g, const ConvexityBounds& b,
                         const LmiCertificate& cert, const RateParams& rates) {
    const int n = static_cast<int>(g.L.rows());
    const int nm1 = n - 1;
    if (cert.P2.rows() != nm1 || cert.P3.rows() != nm1) {
        throw std::invalid_argument("build_phi: certificate blocks must be (N-1) x (N-1)");
    }
    const double m = b.m();
    const double M = b.M();
    const double ak = rates.alpha * rates.k;
    const double rr = rates.rate_ratio;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nm1, nm1);
    const Eigen::MatrixXd S = g.R.transpose() * g.L * g.R;
    const Eigen::MatrixXd St = g.R.transpose() * g.L.transpose() * g.R;
    const Eigen::MatrixXd P2sym = 0.5 * (cert.P2 + cert.P2.transpose());

    PhiPair out;
    const double phi11 = 2.0 * rr * cert.p11 - m * cert.p11 * ak + cert.delta * M * M;
    const Eigen::MatrixXd phi12 =
        (2.0 * rr * cert.p22 - m * cert.p11 * ak + cert.delta * M * M) * I;

    out.phi1 = Eigen::MatrixXd::Zero(2 * nm1 + 1, 2 * nm1 + 1);
    out.phi1(0, 0) = phi11;
    out.phi1.block(1, 1, nm1, nm1) = phi12;
    out.phi1.block(1, 1 + nm1, nm1, nm1) = rr * cert.P2;
    out.phi1.block(1 + nm1, 1 + nm1, nm1, nm1) = -P2sym;

    const Eigen::MatrixXd phi21 = -cert.p22 * S - cert.p22 * St +
                                  rates.gamma * cert.P2 * S +
                                  rates.gamma * St * cert.P2.transpose();
    const Eigen::MatrixXd phi22 =
        -cert.p22 * I + 0.5 * rates.gamma * S * cert.P3.transpose() +
        0.5 * rates.gamma * cert.P3 * St + 0.5 * rates.alpha * S * cert.P2 +
        0.5 * rates.alpha * cert.P2.transpose() * St;

    out.phi2 = Eigen::MatrixXd::Zero(3 * nm1, 3 * nm1);
    out.phi2.block(0, 0, nm1, nm1) = phi21;
    out.phi2.block(0, nm1, nm1, nm1) = phi22;
    out.phi2.block(0, 2 * nm1, nm1, nm1) = 0.5 * (cert.p22 - cert.p11) * ak * I;
    out.phi2.block(nm1, nm1, nm1, nm1) = -P2sym;
    out.phi2.block(nm1, 2 * nm1, nm1, nm1) = -0.5 * ak * cert.P2.transpose();
    out.phi2.block(2 * nm1, 2 * nm1, nm1, nm1) = -cert.delta * I;

    // Mirror the starred lower blocks of both matrices.
    auto mirror = [](Eigen::MatrixXd& A) {
        const Eigen::Index r = A.rows();
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                A(i, j) = A(j, i);
            }
        }
        A = 0.5 * (A + A.transpose());
    };
    mirror(out.phi1);
    mirror(out.phi2);
    return out;
}

inline Eigen::MatrixXd lmi1_matrix(const LmiCertificate& cert) {
    const Eigen::Index nm1 = cert.P2.rows();
    Eigen::MatrixXd A(2 * nm1, 2 * nm1);
    A.topLeftCorner(nm1, nm1) = cert.p22 * Eigen::MatrixXd::Identity(nm1, nm1);
    A.topRightCorner(nm1, nm1) = cert.P2;
    A.bottomLeftCorner(nm1, nm1) = cert.P2.transpose();
    A.bottomRightCorner(nm1, nm1) = cert.P3;
    return 0.5 * (A + A.transpose());
}

/// Evaluates the three definiteness conditions. Matrix feasibility uses
/// strict signs on the extreme eigenvalues; side conditions, when provided,
/// are echoed into the report without affecting the verdict.
inline FeasibilityReport check_certificate(const LaplacianPair& g, const ConvexityBounds& b,
                                           const LmiCertificate& cert, const RateParams& rates,
                                           std::optional<SideConditions> side = std::nullopt,
                                           double jacobi_tol = 1e-12) {
    const PhiPair phi = build_phi(g, b, cert, rates);
    FeasibilityReport rep;
    rep.lmi1_min_eig = min_eigenvalue(lmi1_matrix(cert), jacobi_tol);
    rep.phi1_max_eig = max_eigenvalue(phi.phi1, jacobi_tol);
    rep.phi2_max_eig = max_eigenvalue(phi.phi2, jacobi_tol);
    rep.feasible =
        rep.lmi1_min_eig > 0.0 && rep.phi1_max_eig < 0.0 && rep.phi2_max_eig < 0.0;
    rep.side = side;
    return rep;
}

struct SearchResult {
    std::optional<LmiCertificate> certificate;
    FeasibilityReport report;        // of the found certificate, or the least
                                     // infeasible candidate when none
    LmiCertificate best_candidate;   // candidate behind `report`
    long evaluations = 0;
};

namespace detail {

inline std::vector<double> log_grid(double exp_lo, double exp_hi, double exp_step) {
    std::vector<double> g;
    for (double e = exp_lo; e <= exp_hi + 1e-12; e += exp_step) {
        g.push_back(std::pow(10.0, e));
    }
    return g;
}

}  // namespace detail

/// Deterministic grid search over the scalar certificate family
/// P2 = s I, P3 = p3 I. Scan order: p11, p22, s, p3, delta, each ascending;
/// the first candidate with all margins beyond 1e-8 is returned. Diagonal
/// entries of a negative-definite matrix must be negative, which prunes most
/// grid points before any eigendecomposition.
inline SearchResult search_certificate(const LaplacianPair& g, const ConvexityBounds& b,
                                       const RateParams& rates, long budget = 300000) {
    if (budget < 1) {
        throw std::invalid_argument("search_certificate: budget must be >= 1");
    }
    const int n = static_cast<int>(g.L.rows());
    const double m = b.m();
    const double M = b.M();
    const double ak = rates.alpha * rates.k;
    const double rr = rates.rate_ratio;
    const double margin = 1e-8;

    const std::vector<double> p_grid = {1e-2, 1e-1, 1.0, 1e1, 1e2};
    const std::vector<double> s_grid = detail::log_grid(-2.0, 1.0, 0.25);
    const std::vector<double> d_grid = detail::log_grid(-3.0, 3.0, 0.125);

    const Eigen::MatrixXd S = g.R.transpose() * g.L * g.R;
    const double sym_diag_min = (S + S.transpose()).diagonal().minCoeff();
    const double sym_diag_max = (S + S.transpose()).diagonal().maxCoeff();

    SearchResult res;
    double best_violation = std::numeric_limits<double>::infinity();
    for (double p11 : p_grid) {
        for (double p22 : p_grid) {
            for (double s : s_grid) {
                for (double p3 : s_grid) {
                    for (double delta : d_grid) {
                        if (res.evaluations >= budget) return res;
                        ++res.evaluations;

                        // Necessary diagonal conditions, checked first.
                        const double phi11 = 2.0 * rr * p11 - m * p11 * ak + delta * M * M;
                        const double phi12 = 2.0 * rr * p22 - m * p11 * ak + delta * M * M;
                        const double c21 = rates.gamma * s - p22;
                        const double phi21_diag_max =
                            c21 > 0.0 ? c21 * sym_diag_max : c21 * sym_diag_min;
                        if (phi11 >= -margin || phi12 >= -margin || phi21_diag_max >= 0.0 ||
                            p3 * p22 <= s * s) {
                            continue;
                        }

                        const LmiCertificate cand =
                            LmiCertificate::scalar(n, p11, p22, s, p3, delta);
                        const FeasibilityReport rep = check_certificate(g, b, cand, rates);
                        const double violation =
                            std::max({-rep.lmi1_min_eig, rep.phi1_max_eig, rep.phi2_max_eig});
                        if (violation < best_violation) {
                            best_violation = violation;
                            res.report = rep;
                            res.best_candidate = cand;
                        }
                        if (rep.lmi1_min_eig > margin && rep.phi1_max_eig < -margin &&
                            rep.phi2_max_eig < -margin) {
                            res.certificate = cand;
                            res.report = rep;
                            res.best_candidate = cand;
                            return res;
                        }
                    }
                }
            }
        }
    }
    return res;
}

/// Lyapunov monitor V = zeta1^T (P (x) I_d) zeta1 over averaged-system
/// coordinates, with zeta1 = (u_f1, u_f2:N, w_f2:N) obtained through the
/// change of variables u_f = T^T x_f, w_f = T^T z_f, T = [r, R].
inline double lyapunov_value(const Eigen::VectorXd& xbar_f, const Eigen::VectorXd& zbar_f,
                             const LaplacianPair& g, const LmiCertificate& cert, int dim) {
    const int n = static_cast<int>(g.L.rows());
    const int nm1 = n - 1;
    if (xbar_f.size() != n * dim || zbar_f.size() != n * dim) {
        throw std::invalid_argument("lyapunov_value: state size must be N*d");
    }

    Eigen::MatrixXd T(n, n);
    T.col(0) = g.r;
    T.rightCols(nm1) = g.R;
    const Eigen::MatrixXd Texp = kron_expand(T, dim);

    const Eigen::VectorXd u_f = Texp.transpose() * xbar_f;
    const Eigen::VectorXd w_f = Texp.transpose() * zbar_f;

    Eigen::VectorXd zeta1((2 * n - 1) * dim);
    zeta1.segment(0, dim) = u_f.segment(0, dim);
    zeta1.segment(dim, nm1 * dim) = u_f.segment(dim, nm1 * dim);
    zeta1.segment(dim + nm1 * dim, nm1 * dim) = w_f.segment(dim, nm1 * dim);

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * n - 1, 2 * n - 1);
    P(0, 0) = cert.p11;
    P.block(1, 1, nm1, nm1) = cert.p22 * Eigen::MatrixXd::Identity(nm1, nm1);
    P.block(1, 1 + nm1, nm1, nm1) = cert.P2;
    P.block(1 + nm1, 1, nm1, nm1) = cert.P2.transpose();
    P.block(1 + nm1, 1 + nm1, nm1, nm1) = cert.P3;

    const Eigen::MatrixXd Pexp = kron_expand(P, dim);
    return zeta1.dot(Pexp * zeta1);
}

}  // namespace ues
