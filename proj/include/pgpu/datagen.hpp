#pragma once

#include "pgpu/dataset.hpp"
#include "pgpu/gap.hpp"
#include "pgpu/platt.hpp"

#include <cstdint>
#include <span>

namespace pgpu {

/// Positives uniform on the triangle (-1,-1), (-1,1), (1,1) (above x2 = x1),
/// negatives uniform on (-1,-1), (1,1), (1,-1). Clean: s = y.
PUDataset gen_triangles(std::size_t n_pos = 1000, std::size_t n_neg = 1000, std::uint64_t seed = 0);

/// P(y = +1 | x) = clamp(0.5 - 10 (x1 - x2), 0, 1) on the overlapping square.
double overlap_positive_probability(double x1, double x2);

/// n points uniform on [-1,1]^2, each positive with overlap_positive_probability.
PUDataset gen_overlap_square(std::size_t n = 2000, std::uint64_t seed = 0);

/// Flips each true positive to unlabelled with probability spec.rate(gap[i]).
/// Negatives and features are untouched; y keeps the clean labels and
/// gap_truth records `gap`.
PUDataset flip_labels(const PUDataset& clean, std::span<const double> gap, const FlipRateSpec& spec,
                      std::uint64_t seed);

/// Trains a calibrated SVM on the clean labels and returns 2 p_pos - 1 for
/// every instance.
std::vector<double> estimate_clean_gap(const PUDataset& clean, const ProbSvmParams& params);

}  // namespace pgpu
