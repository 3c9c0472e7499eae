#pragma once

#include "pgpu/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

namespace pgpu {

/// What a learner is allowed to see: features and observed labels
/// (+1 labelled positive, -1 unlabelled).
struct PuSample {
    Matrix X;
    Labels s;

    std::size_t size() const { return s.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
};

/// PU data with optional ground truth for synthetic or benchmark sets.
struct PUDataset {
    Matrix X;
    Labels s;
    std::optional<Labels> y;                      // latent labels
    std::optional<std::vector<double>> gap_truth;  // gaps that drove label flipping

    std::size_t size() const { return s.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }

    /// Copy with the latent information removed.
    PuSample observed() const { return {X, s}; }

    /// Throws InvalidInput on inconsistent lengths, labels outside {+1, -1},
    /// or an observed positive whose latent label is negative.
    void validate() const;

    PUDataset subset(const IndexList& rows) const;
};

/// Header "x1,...,xd,s,y"; y is left empty when unknown. Doubles are written
/// in shortest round-trip form.
void save_csv(const PUDataset& data, const std::filesystem::path& path);

/// Errors name the offending line number.
PUDataset load_csv(const std::filesystem::path& path);

/// Uniform random train/test partition; n_train = round(n * train_fraction).
std::pair<PUDataset, PUDataset> split(const PUDataset& data, double train_fraction, std::uint64_t seed);

/// Index form of split(): (train rows, test rows).
std::pair<IndexList, IndexList> split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

}  // namespace pgpu
