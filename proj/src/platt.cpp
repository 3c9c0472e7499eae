#include "pgpu/platt.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pgpu {

namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr double kGradientTolerance = 1e-8;
constexpr double kMinStep = 1e-10;
constexpr double kHessianRidge = 1e-12;
constexpr double kMinProbability = 0x1p-53;

double negative_log_likelihood(std::span<const double> f, const std::vector<double>& t, double A,
                               double B) {
    double nll = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double z = f[i] * A + B;
        if (z >= 0.0) nll += t[i] * z + std::log1p(std::exp(-z));
        else nll += (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return nll;
}

}  // namespace

PlattCalibration fit_platt(std::span<const double> f, const Labels& y) {
    if (f.size() != y.size()) throw InvalidInput("fit_platt: length mismatch");
    require_binary(y, "fit_platt");
    require_both_classes(y, "fit_platt");
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    if (*lo == *hi) throw DegenerateInput("fit_platt: decision values are constant");

    double n_pos = 0, n_neg = 0;
    for (int v : y) (v > 0 ? n_pos : n_neg) += 1.0;
    const double hi_target = (n_pos + 1.0) / (n_pos + 2.0);
    const double lo_target = 1.0 / (n_neg + 2.0);
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] > 0 ? hi_target : lo_target;

    double A = 0.0;
    double B = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double fval = negative_log_likelihood(f, t, A, B);

    for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
        double h11 = kHessianRidge, h22 = kHessianRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double z = f[i] * A + B;
            double p, q;  // p = P(+1), q = 1 - p
            if (z >= 0.0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += f[i] * f[i] * d2;
            h22 += d2;
            h21 += f[i] * d2;
            const double d1 = t[i] - p;
            g1 += f[i] * d1;
            g2 += d1;
        }
        if (std::hypot(g1, g2) < kGradientTolerance) break;

        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * dA + g2 * dB;

        double step = 1.0;
        while (step >= kMinStep) {
            const double nA = A + step * dA, nB = B + step * dB;
            const double nf = negative_log_likelihood(f, t, nA, nB);
            if (nf < fval + 1e-4 * step * gd) {
                A = nA;
                B = nB;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < kMinStep) break;  // no further descent available
    }
    return {A, B};
}

ClassProbabilities sigmoid_probabilities(const PlattCalibration& calib, double decision) {
    const double z = calib.A * decision + calib.B;
    // The smaller probability is computed directly to keep its precision.
    const double small = std::max(kMinProbability, 1.0 / (1.0 + std::exp(std::abs(z))));
    if (z >= 0.0) return {small, 1.0 - small};
    return {1.0 - small, small};
}

ClassProbabilities predict_proba(const SvmModel& model, const PlattCalibration& calib, RowRef x) {
    return sigmoid_probabilities(calib, decision_value(model, x));
}

namespace {

std::vector<std::size_t> stratified_folds(const Labels& y, std::size_t folds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    IndexList pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg).push_back(i);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<std::size_t> fold(y.size());
    std::size_t k = 0;
    for (auto i : pos) fold[i] = k++ % folds;
    for (auto i : neg) fold[i] = k++ % folds;
    return fold;
}

}  // namespace

ProbabilisticSvm train_probabilistic_svm(const Matrix& X, const Labels& y,
                                         const ProbSvmParams& params) {
    ProbabilisticSvm out;
    out.model = train_svm(X, y, params.svm);
    const auto n = y.size();

    std::vector<double> f(n);
    if (n >= params.cv_min_samples && params.cv_folds >= 2) {
        const auto fold = stratified_folds(y, params.cv_folds, params.seed);
        for (std::size_t k = 0; k < params.cv_folds; ++k) {
            IndexList train_idx, held_idx;
            for (std::size_t i = 0; i < n; ++i) (fold[i] == k ? held_idx : train_idx).push_back(i);
            if (held_idx.empty()) continue;
            const Labels y_train = select(y, train_idx);
            const bool has_pos = std::count(y_train.begin(), y_train.end(), 1) > 0;
            const bool has_neg = std::count(y_train.begin(), y_train.end(), -1) > 0;
            if (!has_pos || !has_neg) {
                for (auto i : held_idx) f[i] = has_pos ? 1.0 : -1.0;
                continue;
            }
            const SvmModel m = train_svm(select_rows(X, train_idx), y_train, params.svm);
            const Vector dv = decision_values(m, select_rows(X, held_idx));
            for (std::size_t r = 0; r < held_idx.size(); ++r) f[held_idx[r]] = dv(static_cast<Eigen::Index>(r));
        }
    } else {
        const Vector dv = decision_values(out.model, X);
        for (std::size_t i = 0; i < n; ++i) f[i] = dv(static_cast<Eigen::Index>(i));
    }
    out.calibration = fit_platt(f, y);
    return out;
}

std::vector<double> positive_probabilities(const ProbabilisticSvm& clf, const Matrix& X) {
    const Vector dv = decision_values(clf.model, X);
    std::vector<double> p(static_cast<std::size_t>(dv.size()));
    for (Eigen::Index i = 0; i < dv.size(); ++i)
        p[static_cast<std::size_t>(i)] = sigmoid_probabilities(clf.calibration, dv(i)).positive;
    return p;
}

}  // namespace pgpu
