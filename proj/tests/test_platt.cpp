#include "pgpu/platt.hpp"

#include <doctest.h>

#include <random>

using namespace pgpu;

TEST_CASE("symmetric decision values give zero offset") {
    std::vector<double> f;
    Labels y;
    for (int i = 0; i < 10; ++i) {
        f.push_back(1.0);
        y.push_back(1);
        f.push_back(-1.0);
        y.push_back(-1);
    }
    const auto c = fit_platt(f, y);
    CHECK(std::abs(c.B) <= 1e-6);
    CHECK(c.A < 0.0);
}

TEST_CASE("perfectly separated values calibrate confidently") {
    std::vector<double> f;
    Labels y;
    for (int i = 0; i < 50; ++i) {
        f.push_back(1.0 + 0.02 * i);
        y.push_back(1);
        f.push_back(-1.0 - 0.02 * i);
        y.push_back(-1);
    }
    const auto c = fit_platt(f, y);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto p = sigmoid_probabilities(c, f[i]);
        CHECK((y[i] == 1 ? p.positive : p.negative) > 0.9);
    }
}

TEST_CASE("degenerate calibration inputs") {
    CHECK_THROWS_AS(fit_platt(std::vector<double>{0.5, 0.5, 0.5}, Labels{1, -1, 1}), DegenerateInput);
    CHECK_THROWS_AS(fit_platt(std::vector<double>{0.1, 0.5, 0.7}, Labels{1, 1, 1}), DegenerateInput);
    CHECK_THROWS_AS(fit_platt(std::vector<double>{0.1, 0.5}, Labels{1, -1, 1}), InvalidInput);
}

TEST_CASE("sigmoid probabilities") {
    const PlattCalibration c{-2.0, 1.0};
    const auto half = sigmoid_probabilities(c, 0.5);  // A f + B = 0
    CHECK(half.positive == 0.5);
    CHECK(half.negative == 0.5);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const auto p = sigmoid_probabilities(c, u(rng));
        CHECK(p.positive + p.negative == 1.0);
        CHECK(p.positive > 0.0);
        CHECK(p.positive < 1.0);
    }

    double prev = -1.0;
    for (int k = -1500; k <= 1500; ++k) {
        const double p = sigmoid_probabilities(c, k * 0.01).positive;
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("probabilistic svm on separable blobs") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 0.3);
    Matrix X(80, 2);
    Labels y;
    for (Eigen::Index i = 0; i < 80; ++i) {
        const int label = i < 40 ? 1 : -1;
        X(i, 0) = label + g(rng);
        X(i, 1) = g(rng);
        y.push_back(label);
    }
    const auto clf = train_probabilistic_svm(X, y, {.seed = 3});
    CHECK(clf.calibration.A < 0.0);
    const auto p = positive_probabilities(clf, X);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK((y[i] == 1 ? p[i] : 1.0 - p[i]) > 0.5);

    const auto again = train_probabilistic_svm(X, y, {.seed = 3});
    CHECK(again.calibration.A == clf.calibration.A);
    CHECK(again.calibration.B == clf.calibration.B);

    // Small samples use training decision values.
    const Labels ys(y.begin() + 35, y.begin() + 45);
    const auto small = train_probabilistic_svm(X.middleRows(35, 10), ys);
    CHECK(small.calibration.A < 0.0);
}
