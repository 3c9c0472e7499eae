#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgpu {

/// Row-major so that each sample is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// Binary labels in {+1, -1}. For observed PU labels, -1 means unlabelled.
using Labels = std::vector<int>;

using IndexList = std::vector<std::size_t>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (shape, range, format).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Input is well formed but leaves the learning problem without both classes.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Throws DegenerateInput unless both +1 and -1 occur among `labels`.
void require_both_classes(const Labels& labels, const char* what);

/// Throws InvalidInput if any label is outside {+1, -1}.
void require_binary(const Labels& labels, const char* what);

/// Mixes values into a 64-bit seed (splitmix64 finalizer per component).
/// Stable across platforms and builds.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Copies the listed rows of `X`.
Matrix select_rows(const Matrix& X, const IndexList& rows);

template <typename T>
std::vector<T> select(const std::vector<T>& v, const IndexList& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace pgpu
