#pragma once

// Directed weighted communication graphs: Laplacian construction, the
// balance/connectivity validators, and the orthonormal complement pair (r, R)
// used throughout the consensus analysis.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ues {

/// Weighted digraph on n >= 2 nodes. weights(i, j) is the weight of the edge
/// i <- j (agent i receives from agent j); the diagonal is identically zero.
class Digraph {
public:
    Digraph(int n, Eigen::MatrixXd weights) : n_(n), weights_(std::move(weights)) {
        if (n_ < 2) {
            throw std::invalid_argument("Digraph: node count must be >= 2");
        }
        if (weights_.rows() != n_ || weights_.cols() != n_) {
            throw std::invalid_argument("Digraph: weight matrix must be n x n");
        }
        for (int i = 0; i < n_; ++i) {
            if (weights_(i, i) != 0.0) {
                throw std::invalid_argument(
                    "Digraph: diagonal weights must be exactly zero (a_ii = 0)");
            }
            for (int j = 0; j < n_; ++j) {
                if (!(weights_(i, j) >= 0.0) || !std::isfinite(weights_(i, j))) {
                    throw std::invalid_argument(
                        "Digraph: weights must be finite and nonnegative");
                }
            }
        }
    }

    /// Edge list constructor; entries are (i, j, w) with 1-based node indices.
    static Digraph from_edges(int n, const std::vector<std::array<double, 3>>& edges) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : edges) {
            const int i = static_cast<int>(e[0]);
            const int j = static_cast<int>(e[1]);
            if (i < 1 || i > n || j < 1 || j > n) {
                throw std::invalid_argument("Digraph: edge index out of range [1, n]: (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            w(i - 1, j - 1) = e[2];
        }
        return Digraph(n, std::move(w));
    }

    /// Directed ring i -> i+1 (mod n) with unit weights. Weight-balanced and
    /// strongly connected for every n >= 2.
    static Digraph ring(int n) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            w(i, (i + 1) % n) = 1.0;
        }
        return Digraph(n, std::move(w));
    }

    /// Complete digraph with unit weights on all off-diagonal pairs.
    static Digraph complete(int n) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
        w.diagonal().setZero();
        return Digraph(n, std::move(w));
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] const Eigen::MatrixXd& weights() const { return weights_; }

    [[nodiscard]] Eigen::VectorXd out_degrees() const { return weights_.rowwise().sum(); }
    [[nodiscard]] Eigen::VectorXd in_degrees() const { return weights_.colwise().sum().transpose(); }

private:
    int n_;
    Eigen::MatrixXd weights_;
};

/// Laplacian L = D_out - A together with the orthonormal pair
/// r = 1/sqrt(n) * 1 and R spanning the orthogonal complement of 1,
/// so that R^T r = 0 and R^T R = I.
struct LaplacianPair {
    Eigen::MatrixXd L;  // n x n
    Eigen::VectorXd r;  // n
    Eigen::MatrixXd R;  // n x (n-1)
};

/// R is built by Gram-Schmidt on e_2..e_n projected off r, in index order,
/// so the factorization is reproducible across runs and platforms.
inline LaplacianPair laplacian(const Digraph& g) {
    const int n = g.n();
    LaplacianPair out;
    out.L = Eigen::MatrixXd(g.out_degrees().asDiagonal());
    out.L -= g.weights();

    out.r = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

    out.R = Eigen::MatrixXd::Zero(n, n - 1);
    for (int k = 0; k < n - 1; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, k + 1);
        // Two orthogonalization passes keep R^T R = I to machine precision.
        for (int pass = 0; pass < 2; ++pass) {
            v -= (out.r.dot(v)) * out.r;
            for (int j = 0; j < k; ++j) {
                v -= (out.R.col(j).dot(v)) * out.R.col(j);
            }
        }
        const double norm = v.norm();
        if (norm <= 0.0) {
            throw std::runtime_error("laplacian: Gram-Schmidt pivot vanished");
        }
        out.R.col(k) = v / norm;
    }
    return out;
}

/// True iff max_i |d_in^i - d_out^i| <= 1e-12.
inline bool is_weight_balanced(const Digraph& g) {
    return (g.in_degrees() - g.out_degrees()).cwiseAbs().maxCoeff() <= 1e-12;
}

/// True iff every ordered node pair is joined by a directed path. Checked by
/// one forward and one reverse reachability sweep from node 0; edges are the
/// strictly positive weights.
inline bool is_strongly_connected(const Digraph& g) {
    const int n = g.n();
    const auto& w = g.weights();
    auto sweep = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                const double wt = forward ? w(u, v) : w(v, u);
                if (wt > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (char s : seen) {
            if (!s) return false;
        }
        return true;
    };
    return sweep(true) && sweep(false);
}

/// Kronecker expansion L (x) I_d used to apply the Laplacian to stacked
/// d-dimensional agent states.
inline Eigen::MatrixXd kron_expand(const Eigen::MatrixXd& L, int d) {
    if (d < 1) {
        throw std::invalid_argument("kron_expand: dimension must be >= 1");
    }
    const Eigen::Index n = L.rows();
    const Eigen::Index m = L.cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * d, m * d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (L(i, j) != 0.0) {
                out.block(i * d, j * d, d, d) =
                    L(i, j) * Eigen::MatrixXd::Identity(d, d);
            }
        }
    }
    return out;
}

}  // namespace ues
