#include "pgpu/kernels.hpp"

#include <cmath>
#include <string>

namespace pgpu {

KernelSpec KernelSpec::default_for(std::size_t dim) {
    if (dim == 0) throw InvalidInput("kernel: feature dimension must be positive");
    return rbf(1.0 / static_cast<double>(dim));
}

void KernelSpec::validate() const {
    if (kind == KernelKind::rbf && !(gamma > 0.0) )
        throw InvalidInput("kernel: rbf gamma must be positive");
}

KernelSpec resolve_kernel(const std::optional<KernelSpec>& spec, std::size_t dim) {
    if (spec) {
        spec->validate();
        return *spec;
    }
    return KernelSpec::default_for(dim);
}

std::string to_string(KernelKind kind) {
    return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "rbf") return KernelKind::rbf;
    throw InvalidInput("unknown kernel kind '" + name + "'");
}

namespace {

inline double eval_unchecked(const KernelSpec& spec, const double* x, const double* z,
                             Eigen::Index d) {
    if (spec.kind == KernelKind::linear) {
        double dot = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) dot += x[k] * z[k];
        return dot;
    }
    double sq = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x[k] - z[k];
        sq += diff * diff;
    }
    return std::exp(-spec.gamma * sq);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, RowRef x, RowRef z) {
    if (x.size() != z.size())
        throw InvalidInput("kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                           std::to_string(z.size()) + ")");
    spec.validate();
    Eigen::RowVectorXd xv = x, zv = z;
    return eval_unchecked(spec, xv.data(), zv.data(), xv.size());
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& Z) {
    if (X.cols() != Z.cols())
        throw InvalidInput("gram_matrix: dimension mismatch (" + std::to_string(X.cols()) +
                           " vs " + std::to_string(Z.cols()) + ")");
    if (X.rows() == 0 || Z.rows() == 0) throw InvalidInput("gram_matrix: empty input");
    spec.validate();
    const Eigen::Index d = X.cols();
    Matrix G(X.rows(), Z.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double* xi = X.row(i).data();
        for (Eigen::Index j = 0; j < Z.rows(); ++j) G(i, j) = eval_unchecked(spec, xi, Z.row(j).data(), d);
    }
    return G;
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& X) {
    if (X.rows() == 0) throw InvalidInput("gram_matrix: empty input");
    spec.validate();
    const Eigen::Index n = X.rows(), d = X.cols();
    Matrix G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* xi = X.row(i).data();
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = eval_unchecked(spec, xi, X.row(j).data(), d);
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

}  // namespace pgpu
