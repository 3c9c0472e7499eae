#include "pgpu/harness.hpp"

#include "pgpu/config.hpp"
#include "pgpu/datagen.hpp"
#include "pgpu/parallel.hpp"
#include "pgpu/platt.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace pgpu {

std::string to_string(Method m) {
    switch (m) {
        case Method::pgpu: return "pgpu";
        case Method::pgpu_cv: return "pgpu_cv";
        case Method::svm_naive: return "svm_naive";
        case Method::elkan: return "elkan";
        case Method::clean: return "clean";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::pgpu, Method::pgpu_cv, Method::svm_naive, Method::elkan, Method::clean})
        if (to_string(m) == name) return m;
    throw InvalidInput("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (n_splits < 1) throw InvalidInput("config: n_splits must be at least 1");
    if (methods.empty()) throw InvalidInput("config: methods must not be empty");
    if (flip.empty()) throw InvalidInput("config: at least one setting is required");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidInput("config: train_fraction must lie in (0, 1)");
    if (!(svm.C > 0.0)) throw InvalidInput("config: svm.C must be positive");
    if (svm.kernel) svm.kernel->validate();
    kmm.validate();
    if (n_prime < 1) throw InvalidInput("config: n_prime must be positive");
    if (cv.folds < 2) throw InvalidInput("config: cv.folds must be at least 2");
    for (const auto& f : flip)
        if (f) f->validate();
    if (dataset_source.kind == DatasetSource::Kind::csv && dataset_source.path.empty())
        throw InvalidInput("config: csv dataset needs a path");
}

bool SuiteResult::all_failed() const {
    return std::none_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.accuracy.has_value(); });
}

double accuracy(const Labels& pred, const Labels& truth) {
    if (pred.size() != truth.size()) throw InvalidInput("accuracy: length mismatch");
    if (pred.empty()) throw InvalidInput("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double evaluate(const SvmModel& model, const PUDataset& test) {
    if (!test.y) throw InvalidInput("evaluate: test set has no latent labels");
    return accuracy(predict_labels(model, test.X), *test.y);
}

MethodContext method_context(const ExperimentConfig& config, std::uint64_t seed) {
    MethodContext ctx;
    ctx.svm = config.svm;
    ctx.kmm = config.kmm;
    ctx.n_prime = config.n_prime;
    ctx.cv = config.cv;
    ctx.seed = seed;
    return ctx;
}

PgpuConfig pgpu_config(const MethodContext& ctx, BoundaryMode mode) {
    PgpuConfig cfg;
    cfg.prob.svm = ctx.svm;
    cfg.prob.seed = derive_seed({ctx.seed, 0x9b});
    cfg.final_svm = ctx.svm;
    cfg.kmm = ctx.kmm;
    cfg.n_prime = ctx.n_prime;
    cfg.boundary_mode = mode;
    cfg.cv = ctx.cv;
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;
    return cfg;
}

double run_pgpu(const PuSample& train, const PUDataset& test, const MethodContext& ctx, BoundaryMode mode) {
    const PgpuFit fit = fit_pgpu(train, pgpu_config(ctx, mode));
    return evaluate(fit.classifier, test);
}

double run_svm_naive(const PuSample& train, const PUDataset& test, const MethodContext& ctx) {
    return evaluate(train_svm(train.X, train.s, ctx.svm), test);
}

double run_clean(const PuSample& clean_train, const PUDataset& test, const MethodContext& ctx) {
    return run_svm_naive(clean_train, test, ctx);
}

WeightedSample elkan_training_set(const PuSample& train, std::span<const double> g, double c) {
    if (g.size() != train.size()) throw InvalidInput("elkan: probability count differs from sample");
    if (!(c > 0.0 && c <= 1.0)) throw InvalidInput("elkan: c must lie in (0, 1]");
    WeightedSample out;
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.s[i] == 1) {
            rows.push_back(static_cast<Eigen::Index>(i));
            out.y.push_back(1);
            out.weights.push_back(1.0);
            continue;
        }
        const double odds = g[i] >= 1.0 ? std::numeric_limits<double>::infinity() : g[i] / (1.0 - g[i]);
        const double w = c >= 1.0 ? 0.0 : std::clamp((1.0 - c) / c * odds, 0.0, 1.0);
        rows.push_back(static_cast<Eigen::Index>(i));
        out.y.push_back(1);
        out.weights.push_back(w);
        rows.push_back(static_cast<Eigen::Index>(i));
        out.y.push_back(-1);
        out.weights.push_back(1.0 - w);
    }
    out.X.resize(static_cast<Eigen::Index>(rows.size()), train.X.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.X.row(static_cast<Eigen::Index>(r)) = train.X.row(rows[r]);
    return out;
}

double run_elkan(const PuSample& train, const PUDataset& test, const MethodContext& ctx) {
    const auto [fit_idx, hold_idx] = split_indices(train.size(), 0.8, derive_seed({ctx.seed, 0xe1}));
    IndexList hold_pos;
    for (auto i : hold_idx)
        if (train.s[i] == 1) hold_pos.push_back(i);
    if (hold_pos.empty()) throw DegenerateInput("elkan: no labelled positives in the calibration fold");

    ProbSvmParams prob;
    prob.svm = ctx.svm;
    prob.seed = derive_seed({ctx.seed, 0x9b});
    const ProbabilisticSvm clf = train_probabilistic_svm(select_rows(train.X, fit_idx), select(train.s, fit_idx), prob);
    const std::vector<double> g = positive_probabilities(clf, train.X);
    double c = 0.0;
    for (auto i : hold_pos) c += g[i];
    c /= static_cast<double>(hold_pos.size());
    if (!(c > 0.0)) throw DegenerateInput("elkan: estimated label frequency c is 0");

    const WeightedSample ws = elkan_training_set(train, g, c);
    return evaluate(train_weighted_svm(ws.X, ws.y, ws.weights, ctx.svm), test);
}

std::string setting_name(const std::optional<FlipRateSpec>& flip) {
    return flip ? flip->to_string() : "none";
}

namespace {

PUDataset load_source(const ExperimentConfig& config) {
    const auto& src = config.dataset_source;
    switch (src.kind) {
        case DatasetSource::Kind::triangles:
            return gen_triangles(src.n_pos, src.n_neg, derive_seed({config.master_seed, 0xd1}));
        case DatasetSource::Kind::overlap_square:
            return gen_overlap_square(src.n, derive_seed({config.master_seed, 0xd2}));
        case DatasetSource::Kind::csv:
            break;
    }
    PUDataset data = load_csv(src.path);
    data.validate();
    return data;
}

}  // namespace

std::vector<ResultRecord> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<std::string>& settings,
                                    const std::vector<Method>& methods) {
    std::vector<ResultRecord> records;
    for (const auto& setting : settings) {
        for (Method m : methods) {
            ResultRecord r;
            r.method = m;
            r.setting = setting;
            for (const auto& c : cells) {
                if (c.method != m || c.setting != setting) continue;
                r.wall_time_s += c.wall_time_s;
                if (c.accuracy) {
                    r.per_split.push_back(*c.accuracy);
                    r.splits.push_back(c.split);
                } else {
                    r.errors.push_back({c.split, c.error});
                }
            }
            const auto k = static_cast<double>(r.per_split.size());
            if (r.per_split.empty()) {
                r.accuracy_mean = std::numeric_limits<double>::quiet_NaN();
            } else {
                double sum = 0.0;
                for (double a : r.per_split) sum += a;
                r.accuracy_mean = sum / k;
                double ss = 0.0;
                for (double a : r.per_split) ss += (a - r.accuracy_mean) * (a - r.accuracy_mean);
                r.accuracy_std = r.per_split.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
            }
            records.push_back(std::move(r));
        }
    }
    return records;
}

SuiteResult run_suite(const ExperimentConfig& config) {
    config.validate();
    const PUDataset base = load_source(config);
    const bool any_flip = std::any_of(config.flip.begin(), config.flip.end(), [](const auto& f) { return f.has_value(); });

    PUDataset clean = base;
    std::vector<double> clean_gap;
    if (any_flip) {
        if (clean.y && *clean.y != clean.s)
            throw InvalidInput("flipping needs clean data, but the dataset's s and y differ");
        clean.y = clean.s;
        ProbSvmParams prob;
        prob.svm = config.svm;
        prob.seed = derive_seed({config.master_seed, 0xc1});
        clean_gap = estimate_clean_gap(clean, prob);
    }

    std::vector<std::string> settings;
    std::vector<PUDataset> data;
    for (std::size_t k = 0; k < config.flip.size(); ++k) {
        settings.push_back(setting_name(config.flip[k]));
        if (config.flip[k]) data.push_back(flip_labels(clean, clean_gap, *config.flip[k], derive_seed({config.master_seed, k, 0xf1})));
        else data.push_back(base);
    }

    struct Task {
        std::size_t setting, split, method;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < settings.size(); ++s)
        for (std::size_t k = 0; k < config.n_splits; ++k)
            for (std::size_t m = 0; m < config.methods.size(); ++m) tasks.push_back({s, k, m});

    SuiteResult result;
    result.cells.resize(tasks.size());
    parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
        const Task& task = tasks[t];
        const Method method = config.methods[task.method];
        CellResult& cell = result.cells[t];
        cell.method = method;
        cell.setting = settings[task.setting];
        cell.split = task.split;

        const std::uint64_t seed = derive_seed({config.master_seed, task.setting, task.split});
        const auto start = std::chrono::steady_clock::now();
        try {
            const PUDataset& d = data[task.setting];
            const auto [train_idx, test_idx] = split_indices(d.size(), config.train_fraction, seed);
            const PUDataset train = d.subset(train_idx);
            const PUDataset test = d.subset(test_idx);
            const MethodContext ctx = method_context(config, seed);
            switch (method) {
                case Method::pgpu: cell.accuracy = run_pgpu(train.observed(), test, ctx, BoundaryMode::min_nprime); break;
                case Method::pgpu_cv: cell.accuracy = run_pgpu(train.observed(), test, ctx, BoundaryMode::cv); break;
                case Method::svm_naive: cell.accuracy = run_svm_naive(train.observed(), test, ctx); break;
                case Method::elkan: cell.accuracy = run_elkan(train.observed(), test, ctx); break;
                case Method::clean:
                    if (!train.y) throw InvalidInput("clean reference needs latent labels");
                    cell.accuracy = run_clean(PuSample{train.X, *train.y}, test, ctx);
                    break;
            }
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        if (config.record_wall_time)
            cell.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    result.records = aggregate(result.cells, settings, config.methods);
    return result;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char ch : v) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

void write_results(const SuiteResult& result, const ExperimentConfig& config, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string csv = "method,setting,split,accuracy,wall_time_s\n";
    for (const auto& c : result.cells) {
        csv += to_string(c.method) + "," + csv_field(c.setting) + "," + std::to_string(c.split) + ",";
        if (c.accuracy) csv += format_double(*c.accuracy);
        csv += "," + format_double(c.wall_time_s) + "\n";
    }
    write_file(dir / "results.csv", csv);

    nlohmann::json summary;
    summary["config"] = config_to_json(config);
    summary["records"] = records_to_json(result.records);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace pgpu
