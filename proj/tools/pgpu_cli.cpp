// Command line front end: dataset generation, experiment suites, reports.

#include "pgpu/config.hpp"
#include "pgpu/datagen.hpp"
#include "pgpu/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int run_gen(const std::string& dataset, const std::string& flip, std::uint64_t seed, const std::string& out,
            double C, double gamma) {
    pgpu::PUDataset data;
    if (dataset == "triangles") data = pgpu::gen_triangles(1000, 1000, seed);
    else if (dataset == "overlap") data = pgpu::gen_overlap_square(2000, seed);
    else throw pgpu::InvalidInput("unknown dataset '" + dataset + "'");

    if (!flip.empty() && flip != "none") {
        const auto spec = pgpu::FlipRateSpec::parse(flip);
        pgpu::ProbSvmParams prob;
        prob.svm.C = C;
        if (gamma > 0.0) prob.svm.kernel = pgpu::KernelSpec::rbf(gamma);
        prob.seed = pgpu::derive_seed({seed, 0xc1});
        const auto gap = pgpu::estimate_clean_gap(data, prob);
        data = pgpu::flip_labels(data, gap, spec, pgpu::derive_seed({seed, 0xf1}));
    }
    pgpu::save_csv(data, out);
    std::size_t labelled = 0;
    for (int s : data.s) labelled += s == 1;
    std::cerr << "wrote " << data.size() << " rows (" << labelled << " labelled positives) to " << out << "\n";
    return 0;
}

int run_suite_cmd(const std::string& config_path, const std::string& out_dir) {
    pgpu::ExperimentConfig config;
    try {
        config = pgpu::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    pgpu::SuiteResult result;
    try {
        result = pgpu::run_suite(config);
    } catch (const pgpu::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    pgpu::write_results(result, config, out_dir);
    for (const auto& r : result.records) {
        std::cerr << pgpu::to_string(r.method) << " [" << r.setting << "] mean=" << r.accuracy_mean
                  << " std=" << r.accuracy_std << " splits=" << r.per_split.size();
        if (!r.errors.empty()) std::cerr << " failed=" << r.errors.size() << " (" << r.errors.front().message << ")";
        std::cerr << "\n";
    }
    return result.all_failed() ? kRuntimeError : 0;
}

int run_report(const std::string& in_dir, const std::string& format) {
    const auto path = std::filesystem::path(in_dir) / "summary.json";
    std::ifstream f(path);
    if (!f) throw pgpu::InvalidInput("cannot open '" + path.string() + "'");
    const auto summary = nlohmann::json::parse(f);
    std::cout << pgpu::render_report(summary, pgpu::report_format_from_string(format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic-gap PU learning: data generation, experiments, reports"};
    app.require_subcommand(1);

    std::string dataset, flip, out;
    std::uint64_t seed = 0;
    double C = 1.0, gamma = 0.0;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic PU dataset as CSV");
    gen->add_option("--dataset", dataset, "triangles | overlap")->required()->check(CLI::IsMember({"triangles", "overlap"}));
    gen->add_option("--flip", flip, "inverse:a,b | linear:a | constant:a | none");
    gen->add_option("--seed", seed, "Random seed")->default_val(0);
    gen->add_option("--out", out, "Output CSV path")->required();
    gen->add_option("--C", C, "SVM C used to estimate the clean gap")->default_val(1.0);
    gen->add_option("--gamma", gamma, "RBF gamma for the gap estimate (default 1/d)");

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "Run an experiment suite from a JSON config");
    run->add_option("--config", config_path, "Config JSON")->required();
    run->add_option("--out-dir", out_dir, "Directory for results.csv and summary.json")->required();

    std::string in_dir, format = "markdown";
    auto* report = app.add_subcommand("report", "Summarize a results directory");
    report->add_option("--in", in_dir, "Results directory")->required();
    report->add_option("--format", format, "csv | json | markdown")->check(CLI::IsMember({"csv", "json", "markdown"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*gen) return run_gen(dataset, flip, seed, out, C, gamma);
        if (*run) return run_suite_cmd(config_path, out_dir);
        if (*report) return run_report(in_dir, format);
    } catch (const pgpu::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
