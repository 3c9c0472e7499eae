#include "pgpu/svm.hpp"

#include <doctest.h>

#include <random>

using namespace pgpu;

namespace {

struct Problem {
    Matrix X;
    Labels y;
};

// Two noisy Gaussian blobs; overlapping enough to leave bounded multipliers.
Problem blobs(std::size_t n, std::uint64_t seed, double separation = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Problem p;
    p.X.resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        p.X(static_cast<Eigen::Index>(i), 0) = g(rng) + separation * label;
        p.X(static_cast<Eigen::Index>(i), 1) = g(rng);
        p.y.push_back(label);
    }
    return p;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST_CASE("separable points are classified perfectly") {
    Matrix X(4, 2);
    X << 0, 1, 1, 2, 1, -1, 2, 0;
    const Labels y{1, 1, -1, -1};
    const SvmModel m = train_svm(X, y, {.C = 10.0, .kernel = KernelSpec::linear()});
    CHECK(m.converged);
    // Brute-force check of every training prediction.
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double f = decision_value(m, X.row(i));
        CHECK((f > 0 ? 1 : -1) == y[static_cast<std::size_t>(i)]);
    }
    CHECK(predict_labels(m, X) == y);
}

TEST_CASE("decision_value of hand-built models") {
    SvmModel empty;
    empty.dimension = 2;
    empty.bias = -0.25;
    CHECK(decision_value(empty, Eigen::RowVector2d(3, 4)) == -0.25);

    SvmModel one;
    one.dimension = 2;
    one.kernel = KernelSpec::linear();
    one.support_vectors = Matrix(1, 2);
    one.support_vectors << 1, 1;
    one.dual_coefs = {1.0};
    CHECK(decision_value(one, Eigen::RowVector2d(1, 1)) == 2.0);
    CHECK_THROWS_AS(decision_value(one, Eigen::RowVector3d(1, 1, 1)), InvalidInput);
}

TEST_CASE("degenerate and invalid training sets") {
    Matrix X(3, 1);
    X << 0, 1, 2;
    CHECK_THROWS_AS(train_svm(X, {1, 1, 1}), DegenerateInput);
    CHECK_THROWS_AS(train_weighted_svm(X, {1, -1, 1}, std::vector<double>{0, 0, 0}), InvalidInput);
    // Zero weight on the only negative leaves a single class.
    CHECK_THROWS_AS(train_weighted_svm(X, {1, -1, 1}, std::vector<double>{1, 0, 1}), DegenerateInput);
    CHECK_THROWS_AS(train_weighted_svm(X, {1, -1, 1}, std::vector<double>{1, -1, 1}), InvalidInput);
    CHECK_THROWS_AS(train_svm(X, {1, 2, -1}), InvalidInput);
    CHECK_THROWS_AS(train_svm(X, {1, -1}), InvalidInput);
}

TEST_CASE("box constraint and support vector layout") {
    const Problem p = blobs(60, 3, 0.5);
    std::vector<double> w(60);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.25 + static_cast<double>(i % 5) * 0.5;
    const SvmModel m = train_weighted_svm(p.X, p.y, w, {.C = 2.0});
    REQUIRE(m.dual_coefs.size() == static_cast<std::size_t>(m.support_vectors.rows()));
    REQUIRE(m.dual_coefs.size() == m.support_indices.size());
    for (std::size_t k = 0; k < m.dual_coefs.size(); ++k) {
        CHECK(m.dual_coefs[k] != 0.0);
        CHECK(std::abs(m.dual_coefs[k]) <= 2.0 * w[m.support_indices[k]] * (1 + 1e-12));
        CHECK(m.dual_coefs[k] * p.y[m.support_indices[k]] > 0.0);
    }
}

TEST_CASE("KKT residuals stay within tol on random problems") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Problem p = blobs(20 + 3 * seed, seed, 0.8);
        std::mt19937_64 rng(seed + 1000);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        std::vector<double> w(p.y.size());
        for (auto& v : w) v = u(rng);
        const SvmParams params{.C = 1.0 + static_cast<double>(seed % 3)};
        const SvmModel m = train_weighted_svm(p.X, p.y, w, params);
        CHECK(m.converged);
        CHECK(max_kkt_violation(m, p.X, p.y, w) <= params.tol);
    }
}

TEST_CASE("integer weight equals duplicated examples") {
    const Problem p = blobs(30, 11, 0.7);
    std::vector<double> w = ones(30);
    w[4] = 2.0;
    w[7] = 3.0;
    Matrix Xd(33, 2);
    Xd.topRows(30) = p.X;
    Xd.row(30) = p.X.row(4);
    Xd.row(31) = p.X.row(7);
    Xd.row(32) = p.X.row(7);
    Labels yd = p.y;
    yd.push_back(p.y[4]);
    yd.push_back(p.y[7]);
    yd.push_back(p.y[7]);

    const SvmParams tight{.C = 1.0, .tol = 1e-10};
    const SvmModel weighted = train_weighted_svm(p.X, p.y, w, tight);
    const SvmModel duplicated = train_svm(Xd, yd, tight);
    for (double a = -3.0; a <= 3.0; a += 0.5)
        for (double b = -3.0; b <= 3.0; b += 0.5) {
            const Eigen::RowVector2d x(a, b);
            CHECK(std::abs(decision_value(weighted, x) - decision_value(duplicated, x)) <= 1e-6);
        }
}

TEST_CASE("training is deterministic to the bit") {
    const Problem p = blobs(80, 5);
    const SvmModel a = train_svm(p.X, p.y), b = train_svm(p.X, p.y);
    CHECK(a.bias == b.bias);
    CHECK(a.dual_coefs == b.dual_coefs);
    CHECK(a.support_indices == b.support_indices);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("decision_values matches decision_value") {
    const Problem p = blobs(40, 9);
    const SvmModel m = train_svm(p.X, p.y);
    const Vector f = decision_values(m, p.X);
    for (Eigen::Index i = 0; i < p.X.rows(); ++i)
        CHECK(f(i) == doctest::Approx(decision_value(m, p.X.row(i))).epsilon(1e-12));
}
