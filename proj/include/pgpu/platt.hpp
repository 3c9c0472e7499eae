#pragma once

#include "pgpu/common.hpp"
#include "pgpu/svm.hpp"

#include <cstdint>
#include <span>
#include <utility>

namespace pgpu {

/// P(y = +1 | f) = 1 / (1 + exp(A f + B)).
struct PlattCalibration {
    double A = 0.0;
    double B = 0.0;
};

/// Newton fit of the sigmoid to smoothed targets (N+ + 1)/(N+ + 2) and
/// 1/(N- + 2), with backtracking line search. Stops when the gradient norm
/// falls below 1e-8 or after 100 iterations. Throws DegenerateInput for a
/// single class or constant decision values.
PlattCalibration fit_platt(std::span<const double> decision_values, const Labels& y);

struct ClassProbabilities {
    double positive;
    double negative;
};

/// Maps a decision value through the sigmoid. Both probabilities stay in
/// (0, 1) and sum to exactly 1; the smaller one is floored at 2^-53, so the
/// map saturates once |A f + B| exceeds about 36.7.
ClassProbabilities sigmoid_probabilities(const PlattCalibration& calib, double decision);

ClassProbabilities predict_proba(const SvmModel& model, const PlattCalibration& calib, RowRef x);

/// Kernel SVM plus its sigmoid calibration.
struct ProbabilisticSvm {
    SvmModel model;
    PlattCalibration calibration;
};

struct ProbSvmParams {
    SvmParams svm;
    std::size_t cv_folds = 3;
    /// Below this many examples the sigmoid is fitted on training decision
    /// values instead of cross-validated ones.
    std::size_t cv_min_samples = 30;
    std::uint64_t seed = 0;  // fold assignment
};

ProbabilisticSvm train_probabilistic_svm(const Matrix& X, const Labels& y,
                                         const ProbSvmParams& params = {});

/// P(y = +1 | x) for every row of X.
std::vector<double> positive_probabilities(const ProbabilisticSvm& clf, const Matrix& X);

}  // namespace pgpu
