#pragma once

#include "pgpu/common.hpp"
#include "pgpu/kernels.hpp"

#include <optional>
#include <vector>

namespace pgpu {

struct KmmConfig {
    double upper_bound = 1000.0;     // per-weight cap B
    std::optional<double> epsilon;   // unset: (sqrt(n') - 1) / sqrt(n')
    std::size_t max_iterations = 5000;
    double tol = 1e-6;               // stop once a projected step moves no weight by more than this

    void validate() const;
    double resolved_epsilon(std::size_t n_source) const;
};

struct BetaWeights {
    std::vector<double> beta;
};

struct KmmSolution {
    BetaWeights weights;
    double objective = 0.0;  // squared embedding distance at the returned weights
    std::size_t iterations = 0;
    bool converged = false;
    bool ridge_applied = false;
    /// Objective after each iteration; non-increasing.
    std::vector<double> objective_trace;
};

/// Kernel mean matching as an explicit box-constrained QP:
///   J(b) = b'Kb / m^2 - 2 b'c / (n m) + target_mean_sq,
/// where K is the m x m source Gram matrix, c_j = sum_i k(x'_j, x_i) over
/// the n target points and target_mean_sq = 1'K_t 1 / n^2.
struct KmmProblem {
    Matrix source_gram;
    Vector cross_sums;
    double target_mean_sq = 0.0;
    std::size_t n_target = 0;
};

KmmProblem make_kmm_problem(const KernelSpec& kernel, const Matrix& target_X, const Matrix& source_X);

/// Monotone accelerated projected gradient on the QP with the exact
/// projection onto {0 <= b <= B, |mean(b) - 1| <= eps}. If negative
/// curvature is observed the source Gram gets a 1e-8 ridge and the solve
/// restarts once; a second detection throws Error.
KmmSolution solve_kmm_problem(const KmmProblem& problem, const KmmConfig& config);

/// Weights that match the source sample's kernel mean to the target's.
KmmSolution solve_kmm(const KernelSpec& kernel, const Matrix& target_X, const Matrix& source_X,
                      const KmmConfig& config = {});

/// Euclidean projection onto {0 <= b_i <= cap, lo <= sum(b) <= hi}.
std::vector<double> project_box_sum(std::vector<double> v, double cap, double lo, double hi);

}  // namespace pgpu
