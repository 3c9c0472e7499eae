#include "pgpu/datagen.hpp"

#include <algorithm>
#include <random>

namespace pgpu {

namespace {

Eigen::RowVector2d sample_triangle(std::mt19937_64& rng, const Eigen::RowVector2d& a,
                                   const Eigen::RowVector2d& b, const Eigen::RowVector2d& c) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng), v = unit(rng);
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    return a + u * (b - a) + v * (c - a);
}

}  // namespace

PUDataset gen_triangles(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed) {
    if (n_pos == 0 || n_neg == 0) throw InvalidInput("gen_triangles: counts must be positive");
    std::mt19937_64 rng(seed);
    const Eigen::RowVector2d lower_left(-1, -1), upper_left(-1, 1), upper_right(1, 1), lower_right(1, -1);
    PUDataset d;
    d.X.resize(static_cast<Eigen::Index>(n_pos + n_neg), 2);
    d.s.reserve(n_pos + n_neg);
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        const bool positive = i < n_pos;
        d.X.row(static_cast<Eigen::Index>(i)) =
            positive ? sample_triangle(rng, lower_left, upper_left, upper_right)
                     : sample_triangle(rng, lower_left, upper_right, lower_right);
        d.s.push_back(positive ? 1 : -1);
    }
    d.y = d.s;
    return d;
}

double overlap_positive_probability(double x1, double x2) {
    return std::clamp(std::max(0.0, 0.5 - 10.0 * (x1 - x2)), 0.0, 1.0);
}

PUDataset gen_overlap_square(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("gen_overlap_square: n must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0), unit(0.0, 1.0);
    PUDataset d;
    d.X.resize(static_cast<Eigen::Index>(n), 2);
    d.s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = coord(rng), x2 = coord(rng);
        d.X(static_cast<Eigen::Index>(i), 0) = x1;
        d.X(static_cast<Eigen::Index>(i), 1) = x2;
        d.s.push_back(unit(rng) < overlap_positive_probability(x1, x2) ? 1 : -1);
    }
    d.y = d.s;
    return d;
}

PUDataset flip_labels(const PUDataset& clean, std::span<const double> gap, const FlipRateSpec& spec,
                      std::uint64_t seed) {
    clean.validate();
    spec.validate();
    if (gap.size() != clean.size()) throw InvalidInput("flip_labels: gap length differs from dataset");
    if (clean.y && *clean.y != clean.s) throw InvalidInput("flip_labels: dataset is not clean (s != y)");
    for (double g : gap)
        if (!(g >= -1.0 && g <= 1.0)) throw InvalidInput("flip_labels: gap outside [-1, 1]");

    PUDataset out = clean;
    out.y = clean.s;
    out.gap_truth = std::vector<double>(gap.begin(), gap.end());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = unit(rng);  // drawn for every row so positions stay aligned across specs
        if (out.s[i] == 1 && u < spec.rate(gap[i])) out.s[i] = -1;
    }
    return out;
}

std::vector<double> estimate_clean_gap(const PUDataset& clean, const ProbSvmParams& params) {
    clean.validate();
    const Labels& labels = clean.y ? *clean.y : clean.s;
    const ProbabilisticSvm clf = train_probabilistic_svm(clean.X, labels, params);
    return observed_gap(positive_probabilities(clf, clean.X)).gaps;
}

}  // namespace pgpu
