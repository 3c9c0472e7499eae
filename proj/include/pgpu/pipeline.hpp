#pragma once

#include "pgpu/dataset.hpp"
#include "pgpu/gap.hpp"
#include "pgpu/kmm.hpp"
#include "pgpu/platt.hpp"
#include "pgpu/svm.hpp"

#include <cstdint>

namespace pgpu {

enum class BoundaryMode { min_nprime, cv };

struct CvConfig {
    double grid_lo = -0.90;
    double grid_hi = -0.60;
    double grid_step = 0.01;
    std::size_t folds = 5;
};

struct PgpuConfig {
    ProbSvmParams prob;   // estimates P(s | x)
    SvmParams final_svm;  // weighted classifier on the relabelled sample; its kernel also drives KMM
    KmmConfig kmm;
    std::size_t n_prime = 3;
    BoundaryMode boundary_mode = BoundaryMode::min_nprime;
    CvConfig cv;
    std::uint64_t seed = 0;
    unsigned threads = 1;  // boundary search workers; 0 = hardware concurrency
};

struct PgpuFit {
    SvmModel classifier;
    GapEstimate gaps;
    double boundary = 0.0;
    RelabelResult relabelled;
    KmmSolution kmm;
};

/// Observed gaps of the training sample under a calibrated SVM fitted to s.
GapEstimate estimate_observed_gaps(const PuSample& train, const ProbSvmParams& params);

/// Relabel with the given boundary, reweight the relabelled points by kernel
/// mean matching against the whole sample, and train the weighted SVM.
/// Throws DegenerateInput("relabelling produced one class") when the
/// relabelled sample lacks a class.
PgpuFit fit_with_boundary(const PuSample& train, const GapEstimate& gaps, double boundary,
                          const PgpuConfig& config);

struct BoundarySearch {
    std::vector<double> grid;
    std::vector<double> scores;  // mean validation accuracy, NaN if every fold was degenerate
    double boundary = 0.0;
};

/// Picks the boundary by k-fold cross-validation of the full pipeline, scored
/// by accuracy against observed labels. Ties go to the most negative value.
BoundarySearch estimate_boundary_cv(const PuSample& train, const PgpuConfig& config);

/// Full probabilistic-gap PU classifier.
PgpuFit fit_pgpu(const PuSample& train, const PgpuConfig& config);

}  // namespace pgpu
