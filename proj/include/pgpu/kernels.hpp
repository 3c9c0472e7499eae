#pragma once

#include "pgpu/common.hpp"

#include <optional>
#include <string>

namespace pgpu {

enum class KernelKind { linear, rbf };

struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 1.0;  // exp(-gamma * |x - z|^2); unused for linear

    static KernelSpec linear() { return {KernelKind::linear, 0.0}; }
    static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }

    /// rbf with gamma = 1/d.
    static KernelSpec default_for(std::size_t dim);

    void validate() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Returns `spec` if set, otherwise KernelSpec::default_for(dim).
KernelSpec resolve_kernel(const std::optional<KernelSpec>& spec, std::size_t dim);

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

double kernel_eval(const KernelSpec& spec, RowRef x, RowRef z);

/// Dense n x m matrix of kernel_eval(spec, X.row(i), Z.row(j)).
Matrix gram_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& Z);

/// Gram matrix of X with itself; exactly symmetric.
Matrix gram_matrix(const KernelSpec& spec, const Matrix& X);

}  // namespace pgpu
