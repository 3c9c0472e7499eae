#pragma once

#include "pgpu/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace pgpu {

/// Observed probabilistic gaps P(s=+1|x) - P(s=-1|x), each in [-1, 1].
struct GapEstimate {
    std::vector<double> gaps;
};

/// gaps[i] = 2 p_pos[i] - 1. Throws InvalidInput for probabilities outside [0, 1].
GapEstimate observed_gap(std::span<const double> p_pos);

/// Observed gap induced by a true gap and the positive flip rate at that
/// point: (1 - rho)(gap + 1) - 1. No validation; meant for oracles.
double forward_gap(double true_gap, double rho_plus);

/// Instance-dependent rate at which true positives lose their label.
struct FlipRateSpec {
    enum class Kind { inverse, linear, constant };
    Kind kind = Kind::constant;
    double alpha = 0.0;
    double beta = 0.0;  // inverse only

    static FlipRateSpec inverse(double alpha, double beta) { return {Kind::inverse, alpha, beta}; }
    static FlipRateSpec linear(double alpha) { return {Kind::linear, alpha, 0.0}; }
    static FlipRateSpec constant(double alpha) { return {Kind::constant, alpha, 0.0}; }

    /// Flip probability for a point with the given (clean) gap. Zero for
    /// negative gaps; otherwise, with the gap capped at 1,
    ///   inverse:  alpha / (alpha + gap (1 + beta))
    ///   linear:   alpha (1 - gap)
    ///   constant: alpha
    /// clamped to [0, 1].
    double rate(double gap) const;

    void validate() const;

    /// "inverse:0.1,0.5", "linear:1", "constant:0.3".
    std::string to_string() const;
    static FlipRateSpec parse(const std::string& text);

    friend bool operator==(const FlipRateSpec&, const FlipRateSpec&) = default;
};

/// The 17 benchmark settings: 9 inverse (alpha 0.1..0.3 x beta 0.5..1.5),
/// 5 linear (alpha 0.2..1.0), 3 constant (alpha 0.1..0.3).
std::vector<FlipRateSpec> benchmark_flip_settings();

inline constexpr double kBoundaryMargin = 1e-6;

/// Mean of the `n_prime` smallest gaps among observed positives, clamped to
/// [-1 + 1e-6, -1e-6].
double estimate_boundary_min(const GapEstimate& gaps, const Labels& observed, std::size_t n_prime);

struct RelabelResult {
    double boundary = 0.0;
    IndexList positive_idx;
    IndexList negative_idx;
    IndexList discarded_idx;

    /// Selected indices (positives then negatives) with their new labels.
    IndexList selected() const;
    Labels selected_labels() const;
};

/// Observed positives stay positive. Unlabelled points become negative when
/// gap <= boundary, positive when gap > 0, and are discarded otherwise.
RelabelResult relabel(const GapEstimate& gaps, const Labels& observed, double boundary);

/// Boundary candidates lo, lo + step, ..., hi. The defaults give the 31
/// values -0.90, -0.89, ..., -0.60.
std::vector<double> boundary_grid(double lo = -0.90, double hi = -0.60, double step = 0.01);

/// Index of the best finite score; ties go to the lowest index. Throws
/// Error if no score is finite.
std::size_t select_best_candidate(std::span<const double> scores);

}  // namespace pgpu
