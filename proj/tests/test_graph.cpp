#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ues/eig.hpp"
#include "ues/graph.hpp"

using namespace ues;
using Catch::Approx;

TEST_CASE("laplacian of the directed 2-cycle", "[graph]") {
    const Digraph g = Digraph::from_edges(2, {{1, 2, 1.0}, {2, 1, 1.0}});
    const LaplacianPair lp = laplacian(g);
    CHECK(lp.L(0, 0) == 1.0);
    CHECK(lp.L(0, 1) == -1.0);
    CHECK(lp.L(1, 0) == -1.0);
    CHECK(lp.L(1, 1) == 1.0);
}

TEST_CASE("laplacian of the directed 5-ring", "[graph]") {
    const Digraph g = Digraph::ring(5);
    const LaplacianPair lp = laplacian(g);
    for (int i = 0; i < 5; ++i) {
        CHECK(lp.L(i, i) == 1.0);
        int negs = 0;
        for (int j = 0; j < 5; ++j) {
            if (i != j && lp.L(i, j) != 0.0) {
                CHECK(lp.L(i, j) == -1.0);
                ++negs;
            }
        }
        CHECK(negs == 1);
    }
    CHECK((lp.L * Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthonormal complement pair", "[graph]") {
    for (int n : {2, 3, 5, 8}) {
        const LaplacianPair lp = laplacian(Digraph::ring(n));
        CHECK((lp.r - Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)))).norm() == 0.0);
        CHECK((lp.R.transpose() * lp.R - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm() <=
              1e-12);
        CHECK((lp.R.transpose() * lp.r).norm() <= 1e-12);
        CHECK((lp.L * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("R construction is deterministic", "[graph]") {
    const LaplacianPair a = laplacian(Digraph::ring(5));
    const LaplacianPair b = laplacian(Digraph::ring(5));
    CHECK((a.R - b.R).norm() == 0.0);
}

TEST_CASE("weight balance", "[graph]") {
    CHECK(is_weight_balanced(Digraph::ring(5)));
    const Digraph star = Digraph::from_edges(3, {{1, 2, 1.0}, {1, 3, 1.0}});
    CHECK_FALSE(is_weight_balanced(star));

    // Symmetric weights force balance.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(6, 6);
        for (int i = 0; i < 6; ++i) {
            for (int j = i + 1; j < 6; ++j) {
                w(i, j) = w(j, i) = dist(rng);
            }
        }
        CHECK(is_weight_balanced(Digraph(6, w)));
    }
}

TEST_CASE("strong connectivity", "[graph]") {
    CHECK(is_strongly_connected(Digraph::ring(5)));
    const Digraph path = Digraph::from_edges(3, {{1, 2, 1.0}, {2, 3, 1.0}});
    CHECK_FALSE(is_strongly_connected(path));
    CHECK(is_strongly_connected(Digraph::complete(4)));
}

TEST_CASE("balanced graphs have vanishing column sums", "[graph]") {
    for (const Digraph& g : {Digraph::ring(5), Digraph::complete(4)}) {
        const LaplacianPair lp = laplacian(g);
        CHECK((Eigen::RowVectorXd::Ones(g.n()) * lp.L).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("kron expansion", "[graph]") {
    const Eigen::MatrixXd L = laplacian(Digraph::from_edges(2, {{1, 2, 1.0}, {2, 1, 1.0}})).L;
    CHECK((kron_expand(L, 1) - L).norm() == 0.0);

    const Eigen::MatrixXd K = kron_expand(L, 2);
    REQUIRE(K.rows() == 4);
    Eigen::MatrixXd expect(4, 4);
    expect << 1, 0, -1, 0,
              0, 1, 0, -1,
              -1, 0, 1, 0,
              0, -1, 0, 1;
    CHECK((K - expect).norm() == 0.0);

    // (L (x) I_d)(1 (x) v) = 0 for any v.
    const Eigen::MatrixXd L5 = laplacian(Digraph::ring(5)).L;
    const Eigen::MatrixXd K3 = kron_expand(L5, 3);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v(i) = dist(rng);
    Eigen::VectorXd ones_v(15);
    for (int j = 0; j < 5; ++j) ones_v.segment(3 * j, 3) = v;
    CHECK((K3 * ones_v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("symmetric part of R^T L R is positive definite", "[graph]") {
    for (const Digraph& g : {Digraph::ring(5), Digraph::complete(4)}) {
        const LaplacianPair lp = laplacian(g);
        const Eigen::MatrixXd S = lp.R.transpose() * lp.L * lp.R;
        CHECK(min_eigenvalue(0.5 * (S + S.transpose())) > 0.0);
    }
}

TEST_CASE("digraph validation", "[graph]") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 0) = 1.0;
    CHECK_THROWS_AS(Digraph(3, w), std::invalid_argument);

    Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(3, 3);
    neg(0, 1) = -1.0;
    CHECK_THROWS_AS(Digraph(3, neg), std::invalid_argument);

    CHECK_THROWS_AS(Digraph(1, Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(Digraph::from_edges(3, {{1, 4, 1.0}}), std::invalid_argument);
}
