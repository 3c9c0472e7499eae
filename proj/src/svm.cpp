#include "pgpu/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pgpu {

namespace {

// Matrices above this many rows get their kernel columns computed on demand
// instead of being stored densely (8000^2 doubles is ~512 MB).
constexpr Eigen::Index kDenseLimit = 8000;

class KernelColumns {
public:
    KernelColumns(const KernelSpec& spec, const Matrix& X) : spec_(spec), X_(X) {
        if (X.rows() <= kDenseLimit) {
            dense_ = gram_matrix(spec, X);
        } else {
            diag_.resize(X.rows());
            for (Eigen::Index i = 0; i < X.rows(); ++i) diag_(i) = kernel_eval(spec, X.row(i), X.row(i));
        }
    }

    double diag(Eigen::Index i) const { return dense_.size() ? dense_(i, i) : diag_(i); }

    /// Column i of the Gram matrix. The returned pointer stays valid until the
    /// next call with the same slot.
    const double* column(Eigen::Index i, int slot) {
        if (dense_.size()) return dense_.row(i).data();  // symmetric
        Vector& buf = scratch_[slot];
        buf.resize(X_.rows());
        for (Eigen::Index t = 0; t < X_.rows(); ++t) buf(t) = kernel_eval(spec_, X_.row(t), X_.row(i));
        return buf.data();
    }

private:
    KernelSpec spec_;
    const Matrix& X_;
    Matrix dense_;
    Vector diag_;
    Vector scratch_[2];
};

constexpr double kTau = 1e-12;

}  // namespace

SvmModel train_weighted_svm(const Matrix& X, const Labels& y, std::span<const double> weights,
                            const SvmParams& params) {
    const auto n_all = static_cast<std::size_t>(X.rows());
    if (y.size() != n_all || weights.size() != n_all)
        throw InvalidInput("train_weighted_svm: X, y and weights have different lengths");
    if (n_all < 2) throw InvalidInput("train_weighted_svm: need at least two examples");
    if (!(params.C > 0.0)) throw InvalidInput("train_weighted_svm: C must be positive");
    if (!(params.tol > 0.0)) throw InvalidInput("train_weighted_svm: tol must be positive");
    require_binary(y, "train_weighted_svm");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InvalidInput("train_weighted_svm: weights must be finite and nonnegative");

    IndexList active;
    for (std::size_t i = 0; i < n_all; ++i)
        if (weights[i] > 0.0) active.push_back(i);
    if (active.empty()) throw InvalidInput("train_weighted_svm: all weights are zero");
    require_both_classes(select(y, active), "train_weighted_svm");

    const KernelSpec kernel = resolve_kernel(params.kernel, static_cast<std::size_t>(X.cols()));
    const Matrix Xa = active.size() == n_all ? X : select_rows(X, active);
    const auto n = static_cast<Eigen::Index>(active.size());

    std::vector<double> yv(active.size()), upper(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        yv[k] = y[active[k]];
        upper[k] = params.C * weights[active[k]];
    }

    KernelColumns K(kernel, Xa);
    std::vector<double> alpha(active.size(), 0.0);
    std::vector<double> grad(active.size(), -1.0);

    const std::size_t max_iter = params.max_iterations
                                     ? params.max_iterations
                                     : std::max<std::size_t>(10 * active.size() * active.size(), 10000);
    const double inf = std::numeric_limits<double>::infinity();

    std::size_t iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        // Maximal violating pair: i maximizes -y G over I_up, j minimizes it over I_low.
        double gmax = -inf, gmin = inf;
        Eigen::Index i = -1, j = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double v = -yv[t] * grad[t];
            const bool up = yv[t] > 0 ? alpha[t] < upper[t] : alpha[t] > 0.0;
            const bool low = yv[t] > 0 ? alpha[t] > 0.0 : alpha[t] < upper[t];
            if (up && v > gmax) {
                gmax = v;
                i = t;
            }
            if (low && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < params.tol) {
            converged = true;
            break;
        }

        const double* Ki = K.column(i, 0);
        const double* Kj = K.column(j, 1);
        const double Qii = K.diag(i), Qjj = K.diag(j);
        const double Qij = yv[i] * yv[j] * Ki[j];
        const double Ci = upper[i], Cj = upper[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        double ai = old_ai, aj = old_aj;

        if (yv[i] != yv[j]) {
            double quad = Qii + Qjj + 2.0 * Qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > Ci - Cj) {
                if (ai > Ci) {
                    ai = Ci;
                    aj = Ci - diff;
                }
            } else if (aj > Cj) {
                aj = Cj;
                ai = Cj + diff;
            }
        } else {
            double quad = Qii + Qjj - 2.0 * Qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > Ci) {
                if (ai > Ci) {
                    ai = Ci;
                    aj = sum - Ci;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > Cj) {
                if (aj > Cj) {
                    aj = Cj;
                    ai = sum - Cj;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        const double di = (ai - old_ai) * yv[i], dj = (aj - old_aj) * yv[j];
        for (Eigen::Index t = 0; t < n; ++t) grad[t] += yv[t] * (Ki[t] * di + Kj[t] * dj);
    }

    // Bias from free multipliers, or the midpoint of the feasible interval.
    double ub = inf, lb = -inf, sum_free = 0.0;
    std::size_t n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = yv[t] * grad[t];
        if (alpha[t] >= upper[t]) {
            if (yv[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (yv[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    SvmModel model;
    model.kernel = kernel;
    model.C = params.C;
    model.dimension = static_cast<std::size_t>(X.cols());
    model.bias = -rho;
    model.iterations = iter;
    model.converged = converged;
    IndexList sv_local;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sv_local.push_back(static_cast<std::size_t>(t));
            model.dual_coefs.push_back(alpha[t] * yv[t]);
            model.support_indices.push_back(active[t]);
        }
    }
    model.support_vectors = select_rows(Xa, sv_local);
    return model;
}

SvmModel train_svm(const Matrix& X, const Labels& y, const SvmParams& params) {
    const std::vector<double> ones(static_cast<std::size_t>(X.rows()), 1.0);
    return train_weighted_svm(X, y, ones, params);
}

double decision_value(const SvmModel& model, RowRef x) {
    if (static_cast<std::size_t>(x.size()) != model.dimension)
        throw InvalidInput("decision_value: dimension mismatch (" + std::to_string(x.size()) +
                           " vs " + std::to_string(model.dimension) + ")");
    double f = model.bias;
    for (Eigen::Index k = 0; k < model.support_vectors.rows(); ++k)
        f += model.dual_coefs[static_cast<std::size_t>(k)] *
             kernel_eval(model.kernel, model.support_vectors.row(k), x);
    return f;
}

Vector decision_values(const SvmModel& model, const Matrix& X) {
    if (static_cast<std::size_t>(X.cols()) != model.dimension)
        throw InvalidInput("decision_values: dimension mismatch (" + std::to_string(X.cols()) +
                           " vs " + std::to_string(model.dimension) + ")");
    Vector f = Vector::Constant(X.rows(), model.bias);
    if (model.support_vectors.rows() == 0 || X.rows() == 0) return f;
    const Matrix G = gram_matrix(model.kernel, X, model.support_vectors);
    const Eigen::Map<const Vector> coefs(model.dual_coefs.data(),
                                         static_cast<Eigen::Index>(model.dual_coefs.size()));
    f += G * coefs;
    return f;
}

int predict_label(const SvmModel& model, RowRef x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

Labels predict_labels(const SvmModel& model, const Matrix& X) {
    const Vector f = decision_values(model, X);
    Labels out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = f(i) >= 0.0 ? 1 : -1;
    return out;
}

double max_kkt_violation(const SvmModel& model, const Matrix& X, const Labels& y,
                         std::span<const double> weights) {
    const auto n = static_cast<std::size_t>(X.rows());
    if (y.size() != n || weights.size() != n)
        throw InvalidInput("max_kkt_violation: X, y and weights have different lengths");
    std::vector<double> alpha(n, 0.0);
    for (std::size_t k = 0; k < model.support_indices.size(); ++k)
        alpha[model.support_indices[k]] = model.dual_coefs[k] * y[model.support_indices[k]];
    const Vector f = decision_values(model, X);
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double upper = model.C * weights[t];
        if (upper <= 0.0) continue;
        const double margin = y[t] * f(static_cast<Eigen::Index>(t)) - 1.0;
        double r;
        if (alpha[t] <= 0.0) r = std::max(0.0, -margin);
        else if (alpha[t] >= upper) r = std::max(0.0, margin);
        else r = std::abs(margin);
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace pgpu
