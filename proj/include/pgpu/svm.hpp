#pragma once

#include "pgpu/common.hpp"
#include "pgpu/kernels.hpp"

#include <optional>
#include <span>

namespace pgpu {

struct SvmParams {
    double C = 1.0;
    /// Unset means KernelSpec::default_for(d) at training time.
    std::optional<KernelSpec> kernel;
    /// Stop once the maximal KKT violation drops below this.
    double tol = 1e-3;
    /// 0 selects the default cap of 10 * n sweeps (10 * n^2 pair updates).
    std::size_t max_iterations = 0;
};

/// Dual-form soft-margin classifier. Immutable after training.
struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i, all nonzero
    IndexList support_indices;       // rows of the training matrix
    double bias = 0.0;
    KernelSpec kernel;
    double C = 1.0;
    std::size_t dimension = 0;
    std::size_t iterations = 0;
    bool converged = true;
};

/// Sequential minimal optimization on the weighted dual
///   min 1/2 a'Qa - 1'a,  0 <= a_i <= C * w_i,  y'a = 0.
/// Working pairs are the maximal violating pair with ties broken by lowest
/// index, so identical inputs give bit-identical models. Examples with zero
/// weight are dropped before solving.
SvmModel train_weighted_svm(const Matrix& X, const Labels& y, std::span<const double> weights,
                            const SvmParams& params = {});

SvmModel train_svm(const Matrix& X, const Labels& y, const SvmParams& params = {});

double decision_value(const SvmModel& model, RowRef x);
Vector decision_values(const SvmModel& model, const Matrix& X);

/// +1 when the decision value is nonnegative, -1 otherwise.
int predict_label(const SvmModel& model, RowRef x);
Labels predict_labels(const SvmModel& model, const Matrix& X);

/// Largest per-example KKT residual of `model` on its own training data:
/// |y f - 1| for free multipliers, the one-sided violation at either bound.
double max_kkt_violation(const SvmModel& model, const Matrix& X, const Labels& y,
                         std::span<const double> weights);

}  // namespace pgpu
