#include "pgpu/datagen.hpp"
#include "pgpu/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace pgpu;

namespace {

PUDataset noisy_triangles(std::size_t n_each, const FlipRateSpec& spec, std::uint64_t seed) {
    const auto clean = gen_triangles(n_each, n_each, seed);
    const auto gap = estimate_clean_gap(clean, {.seed = seed});
    return flip_labels(clean, gap, spec, seed + 1);
}

// Two tight clusters far apart: unlabelled points are confidently negative.
PuSample separated_blobs(std::size_t n_each, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.15);
    PuSample out;
    out.X.resize(static_cast<Eigen::Index>(2 * n_each), 2);
    for (std::size_t i = 0; i < 2 * n_each; ++i) {
        const double c = i < n_each ? 1.0 : -1.0;
        out.X(static_cast<Eigen::Index>(i), 0) = c + g(rng);
        out.X(static_cast<Eigen::Index>(i), 1) = c + g(rng);
        out.s.push_back(i < n_each ? 1 : -1);
    }
    return out;
}

}  // namespace

TEST_CASE("fit_pgpu on noisy triangles") {
    const auto data = noisy_triangles(200, FlipRateSpec::inverse(0.1, 0.5), 3);
    const PgpuConfig cfg{.prob = {.seed = 5}, .seed = 5};
    const PgpuFit fit = fit_pgpu(data.observed(), cfg);

    CHECK(fit.boundary > -1.0);
    CHECK(fit.boundary < 0.0);
    CHECK(fit.boundary == estimate_boundary_min(fit.gaps, data.s, 3));
    const auto chosen = fit.relabelled.selected();
    REQUIRE(fit.kmm.weights.beta.size() == chosen.size());
    const double eps = cfg.kmm.resolved_epsilon(chosen.size());
    const double mean_beta = std::accumulate(fit.kmm.weights.beta.begin(), fit.kmm.weights.beta.end(), 0.0) /
                             static_cast<double>(chosen.size());
    CHECK(std::abs(mean_beta - 1.0) <= eps);

    const auto pred = predict_labels(fit.classifier, data.X);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == (*data.y)[i];
    CHECK(static_cast<double>(hits) / static_cast<double>(pred.size()) > 0.9);

    // Same inputs, same model.
    const PgpuFit again = fit_pgpu(data.observed(), cfg);
    CHECK(again.classifier.dual_coefs == fit.classifier.dual_coefs);
    CHECK(again.classifier.bias == fit.classifier.bias);
}

TEST_CASE("relabelling that leaves one class is reported") {
    const PuSample train = separated_blobs(10, 1);
    GapEstimate gaps;
    for (std::size_t i = 0; i < train.size(); ++i) gaps.gaps.push_back(0.5);
    try {
        fit_with_boundary(train, gaps, -0.5, {});
        FAIL("expected an error");
    } catch (const DegenerateInput& e) {
        CHECK(std::string(e.what()) == "relabelling produced one class");
    }
}

TEST_CASE("fit_pgpu needs n_prime observed positives") {
    PuSample train = separated_blobs(10, 2);
    CHECK_THROWS_AS(fit_pgpu(train, {.n_prime = 11}), InvalidInput);
}

TEST_CASE("boundary search evaluates the whole grid") {
    const auto data = noisy_triangles(100, FlipRateSpec::constant(0.2), 9);
    const PgpuConfig cfg{.prob = {.seed = 2}, .boundary_mode = BoundaryMode::cv, .seed = 4};
    const auto search = estimate_boundary_cv(data.observed(), cfg);
    REQUIRE(search.grid.size() == 31);
    REQUIRE(search.scores.size() == 31);
    CHECK(search.grid == boundary_grid());
    CHECK(std::find(search.grid.begin(), search.grid.end(), search.boundary) != search.grid.end());
    const auto best = select_best_candidate(search.scores);
    CHECK(search.boundary == search.grid[best]);
    for (double s : search.scores)
        if (!std::isnan(s)) CHECK(s <= search.scores[best]);

    // Thread count does not change the outcome.
    PgpuConfig threaded = cfg;
    threaded.threads = 3;
    const auto search2 = estimate_boundary_cv(data.observed(), threaded);
    CHECK(search2.boundary == search.boundary);
    for (std::size_t c = 0; c < 31; ++c)
        CHECK((search2.scores[c] == search.scores[c] || (std::isnan(search2.scores[c]) && std::isnan(search.scores[c]))));
}

TEST_CASE("single-candidate grid returns that candidate") {
    const auto data = noisy_triangles(60, FlipRateSpec::constant(0.2), 4);
    PgpuConfig cfg{.boundary_mode = BoundaryMode::cv};
    cfg.cv = {.grid_lo = -0.75, .grid_hi = -0.75, .grid_step = 0.01, .folds = 5};
    const auto search = estimate_boundary_cv(data.observed(), cfg);
    CHECK(search.grid == std::vector<double>{-0.75});
    CHECK(search.boundary == -0.75);
}

TEST_CASE("tied scores select the most negative candidate") {
    // Unlabelled points all sit far below every candidate, so every candidate
    // relabels the same points and scores tie.
    const PuSample train = separated_blobs(40, 6);
    const auto search = estimate_boundary_cv(train, {});
    bool all_equal = true;
    for (double s : search.scores) all_equal = all_equal && s == search.scores.front();
    REQUIRE(all_equal);
    CHECK(search.boundary == -0.90);
}

TEST_CASE("boundary search input checks") {
    const PuSample train = separated_blobs(3, 1);
    CHECK_THROWS_AS(estimate_boundary_cv(train, {.cv = {.folds = 1}}), InvalidInput);
    CHECK_THROWS_AS(estimate_boundary_cv(train, {.cv = {.folds = 4}}), InvalidInput);
}
