#pragma once

// Cyclic Jacobi eigendecomposition for small symmetric matrices. This is the
// single definiteness primitive behind the certificate checks; it is kept
// dependency-free so an independent oracle (characteristic polynomial, LU
// determinant) can cross-check it in the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ues {

struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // column k pairs with values[k]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// The input must satisfy ||A - A^T|| <= 1e-9 * ||A||; it is symmetrized
/// internally. Sweeps run until the off-diagonal Frobenius norm drops below
/// tol * ||A||_F.
inline SymEig sym_eig(const Eigen::MatrixXd& A, double tol = 1e-12) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("sym_eig: matrix must be square");
    }
    const Eigen::Index n = A.rows();
    const double scale = A.norm();
    if ((A - A.transpose()).norm() > 1e-9 * std::max(scale, 1.0)) {
        throw std::invalid_argument("sym_eig: matrix is not symmetric");
    }

    Eigen::MatrixXd M = 0.5 * (A + A.transpose());
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                s += 2.0 * M(p, q) * M(p, q);
            }
        }
        return std::sqrt(s);
    };

    const double target = tol * std::max(scale, 1e-300);
    int sweep = 0;
    for (; sweep < 100 && off_norm() > target; ++sweep) {
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = M(p, q);
                if (std::abs(apq) <= target / static_cast<double>(n * n)) continue;
                const double theta = (M(q, q) - M(p, p)) / (2.0 * apq);
                const double sgn = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sgn / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double mip = M(i, p), miq = M(i, q);
                    M(i, p) = c * mip - s * miq;
                    M(i, q) = s * mip + c * miq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double mpi = M(p, i), mqi = M(q, i);
                    M(p, i) = c * mpi - s * mqi;
                    M(q, i) = s * mpi + c * mqi;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (off_norm() > target) {
        throw std::runtime_error("sym_eig: Jacobi sweeps did not converge");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return M(a, a) < M(b, b); });

    SymEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = M(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = V.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// Smallest and largest eigenvalue shortcuts for definiteness tests.
inline double min_eigenvalue(const Eigen::MatrixXd& A, double tol = 1e-12) {
    return sym_eig(A, tol).values(0);
}
inline double max_eigenvalue(const Eigen::MatrixXd& A, double tol = 1e-12) {
    const SymEig e = sym_eig(A, tol);
    return e.values(e.values.size() - 1);
}

}  // namespace ues
