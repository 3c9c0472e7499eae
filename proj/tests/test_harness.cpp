#include "pgpu/config.hpp"
#include "pgpu/datagen.hpp"
#include "pgpu/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pgpu;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pgpu_unit" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// f(x) = x1, so the sign of the first coordinate is the prediction.
SvmModel first_coordinate_model() {
    SvmModel m;
    m.dimension = 2;
    m.kernel = KernelSpec::linear();
    m.support_vectors = Matrix(1, 2);
    m.support_vectors << 1, 0;
    m.dual_coefs = {1.0};
    return m;
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.dataset_source.n_pos = 60;
    c.dataset_source.n_neg = 60;
    c.flip = {FlipRateSpec::constant(0.2)};
    c.methods = {Method::pgpu, Method::svm_naive, Method::elkan};
    c.n_splits = 10;
    c.master_seed = 11;
    return c;
}

}  // namespace

TEST_CASE("evaluate examples") {
    Matrix X(4, 2);
    X << 1, 0, 2, 5, -1, 3, -0.5, -2;
    PUDataset test{X, {1, 1, -1, -1}, Labels{1, 1, -1, -1}, std::nullopt};
    const auto m = first_coordinate_model();
    CHECK(evaluate(m, test) == 1.0);
    test.y = Labels{-1, -1, 1, 1};
    CHECK(evaluate(m, test) == 0.0);
    test.y = Labels{1, 1, -1, 1};
    CHECK(evaluate(m, test) == 0.75);
    test.y.reset();
    CHECK_THROWS_AS(evaluate(m, test), InvalidInput);
    CHECK(accuracy({1, -1, 1}, {1, 1, 1}) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(accuracy({1}, {1, 1}), InvalidInput);
}

TEST_CASE("method names") {
    for (Method m : {Method::pgpu, Method::pgpu_cv, Method::svm_naive, Method::elkan, Method::clean})
        CHECK(method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(method_from_string("liu"), InvalidInput);
}

TEST_CASE("elkan training set") {
    Matrix X(4, 1);
    X << 0, 1, 2, 3;
    const PuSample train{X, {1, -1, -1, 1}};
    const std::vector<double> g{0.9, 0.2, 0.6, 0.8};

    const auto none = elkan_training_set(train, g, 1.0);
    CHECK(none.y == Labels{1, 1, -1, 1, -1, 1});
    CHECK(none.weights == std::vector<double>{1, 0, 1, 0, 1, 1});

    const auto ws = elkan_training_set(train, g, 0.5);
    // w = (1-c)/c * g/(1-g): 0.25 for g = 0.2, 1.5 clamped to 1 for g = 0.6.
    CHECK(ws.weights[1] == doctest::Approx(0.25));
    CHECK(ws.weights[2] == doctest::Approx(0.75));
    CHECK(ws.weights[3] == 1.0);
    CHECK(ws.weights[4] == 0.0);
    CHECK(ws.X(1, 0) == 1.0);
    CHECK(ws.X(2, 0) == 1.0);
    for (double w : ws.weights) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
    CHECK_THROWS_AS(elkan_training_set(train, g, 0.0), InvalidInput);
    CHECK_THROWS_AS(elkan_training_set(train, std::vector<double>{0.5}, 0.5), InvalidInput);
}

TEST_CASE("naive svm on clean data equals the clean reference") {
    const auto d = gen_triangles(80, 80, 2);
    const auto [train, test] = split(d, 0.75, 3);
    const MethodContext ctx{};
    CHECK(run_svm_naive(train.observed(), test, ctx) == run_clean(PuSample{train.X, *train.y}, test, ctx));
}

TEST_CASE("without noise PGPU tracks the clean svm") {
    const auto clean = gen_triangles(500, 500, 8);
    const auto gap = estimate_clean_gap(clean, {.seed = 1});
    const auto d = flip_labels(clean, gap, FlipRateSpec::constant(0.0), 2);
    double pgpu = 0.0, ref = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const auto [train, test] = split(d, 0.75, k);
        const MethodContext ctx{.seed = k};
        pgpu += run_pgpu(train.observed(), test, ctx, BoundaryMode::min_nprime) / 3.0;
        ref += run_clean(PuSample{train.X, *train.y}, test, ctx) / 3.0;
    }
    CHECK(std::abs(pgpu - ref) <= 0.015);
}

TEST_CASE("suite cardinality and aggregation") {
    const auto config = small_config();
    const auto result = run_suite(config);
    CHECK(result.cells.size() == 30);
    REQUIRE(result.records.size() == 3);
    for (const auto& r : result.records) {
        CHECK(r.setting == "constant:0.2");
        CHECK(r.per_split.size() + r.errors.size() == 10);
        REQUIRE(!r.per_split.empty());
        double sum = 0.0;
        for (double a : r.per_split) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
            sum += a;
        }
        const double mean = sum / static_cast<double>(r.per_split.size());
        CHECK(std::abs(r.accuracy_mean - mean) <= 1e-12);
        double ss = 0.0;
        for (double a : r.per_split) ss += (a - mean) * (a - mean);
        const double sd = r.per_split.size() > 1 ? std::sqrt(ss / static_cast<double>(r.per_split.size() - 1)) : 0.0;
        CHECK(std::abs(r.accuracy_std - sd) <= 1e-12);
        CHECK(r.wall_time_s == 0.0);
    }
    CHECK(result.records[0].method == Method::pgpu);
    CHECK(result.records[2].method == Method::elkan);
}

TEST_CASE("suite output is byte-identical across runs and thread counts") {
    auto config = small_config();
    config.n_splits = 3;
    const auto a = temp_dir("det_a"), b = temp_dir("det_b");
    write_results(run_suite(config), config, a);
    config.threads = 3;
    write_results(run_suite(config), config, b);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    // The summary embeds the config, so compare it with the thread count restored.
    auto sa = json::parse(slurp(a / "summary.json")), sb = json::parse(slurp(b / "summary.json"));
    sb["config"]["threads"] = sa["config"]["threads"];
    CHECK(sa == sb);
    CHECK(slurp(a / "results.csv").rfind("method,setting,split,accuracy,wall_time_s\n", 0) == 0);
}

TEST_CASE("cell failures are recorded without stopping the suite") {
    auto config = small_config();
    config.n_splits = 2;
    config.n_prime = 500;  // more than any training split has labelled positives
    const auto result = run_suite(config);
    CHECK_FALSE(result.all_failed());
    CHECK(result.records[0].per_split.empty());
    CHECK(result.records[0].errors.size() == 2);
    CHECK(std::isnan(result.records[0].accuracy_mean));
    CHECK(result.records[1].per_split.size() == 2);
}

TEST_CASE("csv data without latent labels fails every cell") {
    const auto dir = temp_dir("nolabels");
    const auto d = gen_triangles(30, 30, 1);
    save_csv(PUDataset{d.X, d.s, std::nullopt, std::nullopt}, dir / "data.csv");
    ExperimentConfig config;
    config.dataset_source.kind = DatasetSource::Kind::csv;
    config.dataset_source.path = dir / "data.csv";
    config.methods = {Method::svm_naive};
    config.n_splits = 2;
    const auto result = run_suite(config);
    CHECK(result.all_failed());
    CHECK(result.records[0].errors[0].message.find("latent") != std::string::npos);
}

TEST_CASE("config json") {
    const json j = json::parse(R"({
        "dataset_source": {"kind": "overlap", "n": 300},
        "flip": ["linear:1", null, {"kind": "inverse", "alpha": 0.1, "beta": 0.5}],
        "methods": ["pgpu", "pgpu_cv", "svm_naive", "elkan", "clean"],
        "n_splits": 4, "master_seed": 9,
        "svm": {"C": 2.5, "kernel": {"kind": "rbf", "gamma": 0.7}},
        "kmm": {"upper_bound_B": 100, "epsilon": 0.3, "max_iters": 50, "tol": 1e-5},
        "n_prime": 5, "cv": {"folds": 3, "grid_lo": -0.8}, "threads": 2, "record_wall_time": true
    })");
    const auto c = config_from_json(j);
    CHECK(c.dataset_source.kind == DatasetSource::Kind::overlap_square);
    CHECK(c.dataset_source.n == 300);
    REQUIRE(c.flip.size() == 3);
    CHECK(c.flip[0] == FlipRateSpec::linear(1.0));
    CHECK_FALSE(c.flip[1].has_value());
    CHECK(c.flip[2] == FlipRateSpec::inverse(0.1, 0.5));
    CHECK(c.methods.size() == 5);
    CHECK(c.svm.C == 2.5);
    CHECK(c.svm.kernel == KernelSpec::rbf(0.7));
    CHECK(c.kmm.upper_bound == 100.0);
    CHECK(c.kmm.epsilon == 0.3);
    CHECK(c.kmm.max_iterations == 50);
    CHECK(c.n_prime == 5);
    CHECK(c.cv.folds == 3);
    CHECK(c.cv.grid_lo == -0.8);
    CHECK(c.cv.grid_hi == -0.6);
    CHECK(c.record_wall_time);
    CHECK_FALSE(ExperimentConfig{}.record_wall_time);

    const auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"n_split": 3})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"n_splits": 0})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"methods": []})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"methods": ["liu"]})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"flip": "inverse:0.1"})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"svm": {"C": "big"}})")), InvalidInput);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"dataset_source": "moons"})")), InvalidInput);

    const auto rel = config_from_json(json::parse(R"({"dataset_source": {"csv": "d.csv"}})"), "/data");
    CHECK(rel.dataset_source.path == std::filesystem::path("/data/d.csv"));
}

TEST_CASE("report rendering") {
    auto config = small_config();
    config.n_splits = 2;
    config.methods = {Method::svm_naive, Method::clean};
    const auto dir = temp_dir("report");
    const auto result = run_suite(config);
    write_results(result, config, dir);
    const auto summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("records").size() == 2);

    const auto md = render_report(summary, ReportFormat::markdown);
    CHECK(md.find("| setting | svm_naive | clean |") != std::string::npos);
    CHECK(md.find("constant:0.2") != std::string::npos);
    const auto csv = render_report(summary, ReportFormat::csv);
    CHECK(csv.find("svm_naive") != std::string::npos);
    const auto compact = json::parse(render_report(summary, ReportFormat::json));
    REQUIRE(compact.size() == 2);
    CHECK(compact[0].at("method") == "svm_naive");
    CHECK(compact[0].at("accuracy_mean") == summary.at("records")[0].at("accuracy_mean"));
    CHECK(compact[0].at("n_splits") == 2);
    CHECK(report_format_from_string("markdown") == ReportFormat::markdown);
    CHECK_THROWS_AS(report_format_from_string("html"), InvalidInput);
}
