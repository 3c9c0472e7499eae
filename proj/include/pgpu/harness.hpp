#pragma once

#include "pgpu/dataset.hpp"
#include "pgpu/gap.hpp"
#include "pgpu/kmm.hpp"
#include "pgpu/pipeline.hpp"
#include "pgpu/svm.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pgpu {

enum class Method { pgpu, pgpu_cv, svm_naive, elkan, clean };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct DatasetSource {
    enum class Kind { triangles, overlap_square, csv };
    Kind kind = Kind::triangles;
    std::filesystem::path path;  // csv only
    std::size_t n_pos = 1000;    // triangles
    std::size_t n_neg = 1000;    // triangles
    std::size_t n = 2000;        // overlap_square
};

struct ExperimentConfig {
    DatasetSource dataset_source;
    /// One entry per setting; nullopt runs the data as given.
    std::vector<std::optional<FlipRateSpec>> flip{std::nullopt};
    std::vector<Method> methods{Method::pgpu, Method::svm_naive};
    std::size_t n_splits = 10;
    std::uint64_t master_seed = 0;
    double train_fraction = 0.75;
    SvmParams svm;
    KmmConfig kmm;
    std::size_t n_prime = 3;
    CvConfig cv;
    unsigned threads = 1;  // suite cells in flight; 0 = hardware concurrency
    /// Off by default: every wall_time_s is written as 0 so that reruns
    /// are byte-identical.
    bool record_wall_time = false;

    void validate() const;
};

/// One (setting, split, method) evaluation.
struct CellResult {
    Method method{};
    std::string setting;
    std::size_t split = 0;
    std::optional<double> accuracy;
    double wall_time_s = 0.0;
    std::string error;
};

struct CellError {
    std::size_t split = 0;
    std::string message;
};

struct ResultRecord {
    Method method{};
    std::string setting;
    double accuracy_mean = 0.0;  // NaN when no split succeeded
    double accuracy_std = 0.0;   // sample standard deviation
    std::vector<double> per_split;
    std::vector<std::size_t> splits;  // split id of each per_split entry
    double wall_time_s = 0.0;
    std::vector<CellError> errors;
};

struct SuiteResult {
    std::vector<CellResult> cells;
    std::vector<ResultRecord> records;

    bool all_failed() const;
};

/// Fraction of positions where pred equals truth.
double accuracy(const Labels& pred, const Labels& truth);

/// Accuracy of sign(decision value) against the latent labels of `test`.
/// Throws InvalidInput when the test set has none.
double evaluate(const SvmModel& model, const PUDataset& test);

/// Shared settings for one method run.
struct MethodContext {
    SvmParams svm;
    KmmConfig kmm;
    std::size_t n_prime = 3;
    CvConfig cv;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

MethodContext method_context(const ExperimentConfig& config, std::uint64_t seed);
PgpuConfig pgpu_config(const MethodContext& ctx, BoundaryMode mode);

double run_pgpu(const PuSample& train, const PUDataset& test, const MethodContext& ctx, BoundaryMode mode);
double run_svm_naive(const PuSample& train, const PUDataset& test, const MethodContext& ctx);

/// Weighted training set for the Elkan-Noto baseline: labelled positives
/// keep weight 1; each unlabelled point becomes a positive copy with weight
/// w = clamp((1-c)/c * g/(1-g), 0, 1) and a negative copy with weight 1 - w.
/// Copies are interleaved in the original row order.
struct WeightedSample {
    Matrix X;
    Labels y;
    std::vector<double> weights;
};
WeightedSample elkan_training_set(const PuSample& train, std::span<const double> g, double c);

/// Estimates c = E[g(x) | s = +1] on a held-out 20% of the training data.
double run_elkan(const PuSample& train, const PUDataset& test, const MethodContext& ctx);

/// Reference: the naive SVM trained on clean training labels.
double run_clean(const PuSample& clean_train, const PUDataset& test, const MethodContext& ctx);

/// Runs every (setting x split x method) cell. Cell failures are recorded,
/// not thrown. Dataset loading and flipping errors propagate.
SuiteResult run_suite(const ExperimentConfig& config);

/// ResultRecords from cells, in setting-then-method order.
std::vector<ResultRecord> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<std::string>& settings,
                                    const std::vector<Method>& methods);

/// results.csv (method,setting,split,accuracy,wall_time_s) and summary.json.
void write_results(const SuiteResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& dir);

std::string setting_name(const std::optional<FlipRateSpec>& flip);

}  // namespace pgpu
