#include "pgpu/pipeline.hpp"

#include "pgpu/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace pgpu {

GapEstimate estimate_observed_gaps(const PuSample& train, const ProbSvmParams& params) {
    const ProbabilisticSvm clf = train_probabilistic_svm(train.X, train.s, params);
    return observed_gap(positive_probabilities(clf, train.X));
}

PgpuFit fit_with_boundary(const PuSample& train, const GapEstimate& gaps, double boundary,
                          const PgpuConfig& config) {
    PgpuFit fit;
    fit.gaps = gaps;
    fit.boundary = boundary;
    fit.relabelled = relabel(gaps, train.s, boundary);
    if (fit.relabelled.positive_idx.empty() || fit.relabelled.negative_idx.empty())
        throw DegenerateInput("relabelling produced one class");

    const IndexList chosen = fit.relabelled.selected();
    const Matrix source = select_rows(train.X, chosen);
    const KernelSpec kernel = resolve_kernel(config.final_svm.kernel, train.dim());
    fit.kmm = solve_kmm(kernel, train.X, source, config.kmm);

    SvmParams svm = config.final_svm;
    svm.kernel = kernel;
    fit.classifier = train_weighted_svm(source, fit.relabelled.selected_labels(), fit.kmm.weights.beta, svm);
    return fit;
}

namespace {

std::vector<std::size_t> assign_folds(const Labels& s, std::size_t folds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    IndexList pos, neg;
    for (std::size_t i = 0; i < s.size(); ++i) (s[i] == 1 ? pos : neg).push_back(i);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<std::size_t> fold(s.size());
    std::size_t k = 0;
    for (auto i : pos) fold[i] = k++ % folds;
    for (auto i : neg) fold[i] = k++ % folds;
    return fold;
}

struct FoldData {
    PuSample train;
    PuSample validation;
    GapEstimate gaps;
    bool usable = false;
};

}  // namespace

BoundarySearch estimate_boundary_cv(const PuSample& train, const PgpuConfig& config) {
    if (config.cv.folds < 2) throw InvalidInput("boundary search: need at least 2 folds");
    if (train.size() < config.cv.folds * 2)
        throw InvalidInput("boundary search: training set too small for the fold count");

    BoundarySearch out;
    out.grid = boundary_grid(config.cv.grid_lo, config.cv.grid_hi, config.cv.grid_step);
    const auto fold_of = assign_folds(train.s, config.cv.folds, derive_seed({config.seed, 0xcf}));

    std::vector<FoldData> folds(config.cv.folds);
    parallel_for(folds.size(), config.threads, [&](std::size_t k) {
        IndexList tr, va;
        for (std::size_t i = 0; i < train.size(); ++i) (fold_of[i] == k ? va : tr).push_back(i);
        FoldData& f = folds[k];
        f.train = {select_rows(train.X, tr), select(train.s, tr)};
        f.validation = {select_rows(train.X, va), select(train.s, va)};
        try {
            ProbSvmParams prob = config.prob;
            prob.seed = derive_seed({config.prob.seed, k});
            f.gaps = estimate_observed_gaps(f.train, prob);
            f.usable = true;
        } catch (const DegenerateInput&) {
        }
    });

    // A candidate only matters through how many unlabelled points fall at or
    // below it, so candidates sharing that count share one evaluation.
    std::vector<std::vector<std::size_t>> neg_count(folds.size(), std::vector<std::size_t>(out.grid.size()));
    std::map<std::pair<std::size_t, std::size_t>, double> cache;
    for (std::size_t k = 0; k < folds.size(); ++k) {
        if (!folds[k].usable) continue;
        std::vector<double> unlabelled;
        for (std::size_t i = 0; i < folds[k].train.size(); ++i)
            if (folds[k].train.s[i] == -1 && folds[k].gaps.gaps[i] <= 0.0)
                unlabelled.push_back(folds[k].gaps.gaps[i]);
        std::sort(unlabelled.begin(), unlabelled.end());
        for (std::size_t c = 0; c < out.grid.size(); ++c) {
            const auto cnt = static_cast<std::size_t>(
                std::upper_bound(unlabelled.begin(), unlabelled.end(), out.grid[c]) - unlabelled.begin());
            neg_count[k][c] = cnt;
            cache.emplace(std::pair{k, cnt}, std::numeric_limits<double>::quiet_NaN());
        }
    }

    struct Task {
        std::size_t fold, count, candidate;
    };
    std::vector<Task> tasks;
    for (auto& [key, value] : cache) {
        std::size_t c = 0;
        while (neg_count[key.first][c] != key.second) ++c;
        tasks.push_back({key.first, key.second, c});
    }
    std::vector<double> results(tasks.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
        const FoldData& f = folds[tasks[t].fold];
        try {
            const PgpuFit fit = fit_with_boundary(f.train, f.gaps, out.grid[tasks[t].candidate], config);
            const Labels pred = predict_labels(fit.classifier, f.validation.X);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == f.validation.s[i];
            results[t] = static_cast<double>(hits) / static_cast<double>(pred.size());
        } catch (const DegenerateInput&) {
        }
    });
    for (std::size_t t = 0; t < tasks.size(); ++t) cache[{tasks[t].fold, tasks[t].count}] = results[t];

    out.scores.assign(out.grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < out.grid.size(); ++c) {
        double sum = 0.0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < folds.size(); ++k) {
            if (!folds[k].usable) continue;
            const double acc = cache[{k, neg_count[k][c]}];
            if (std::isnan(acc)) continue;
            sum += acc;
            ++used;
        }
        if (used > 0) out.scores[c] = sum / static_cast<double>(used);
    }
    out.boundary = out.grid[select_best_candidate(out.scores)];
    return out;
}

PgpuFit fit_pgpu(const PuSample& train, const PgpuConfig& config) {
    if (train.size() != static_cast<std::size_t>(train.X.rows()))
        throw InvalidInput("pgpu: X and s lengths differ");
    const GapEstimate gaps = estimate_observed_gaps(train, config.prob);
    double boundary = 0.0;
    if (config.boundary_mode == BoundaryMode::cv) boundary = estimate_boundary_cv(train, config).boundary;
    else boundary = estimate_boundary_min(gaps, train.s, config.n_prime);
    return fit_with_boundary(train, gaps, boundary, config);
}

}  // namespace pgpu
