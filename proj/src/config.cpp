#include "pgpu/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace pgpu {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InvalidInput(std::string("config: ") + where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw InvalidInput(std::string("config: unknown key '") + key + "' in " + where);
}

template <typename T>
T get(const json& obj, const char* key, const char* where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: bad value for '") + key + "' in " + where + ": " + e.what());
    }
}

std::optional<FlipRateSpec> flip_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) {
        const auto text = j.get<std::string>();
        if (text == "none") return std::nullopt;
        return FlipRateSpec::parse(text);
    }
    check_keys(j, "flip", {"kind", "alpha", "beta"});
    const auto kind = get<std::string>(j, "kind", "flip");
    const double alpha = get<double>(j, "alpha", "flip");
    FlipRateSpec spec;
    if (kind == "inverse") spec = FlipRateSpec::inverse(alpha, get<double>(j, "beta", "flip"));
    else if (kind == "linear") spec = FlipRateSpec::linear(alpha);
    else if (kind == "constant") spec = FlipRateSpec::constant(alpha);
    else throw InvalidInput("config: unknown flip kind '" + kind + "'");
    spec.validate();
    return spec;
}

KernelSpec kernel_from_json(const json& j) {
    check_keys(j, "svm.kernel", {"kind", "gamma"});
    KernelSpec k;
    k.kind = kernel_kind_from_string(get<std::string>(j, "kind", "svm.kernel"));
    if (k.kind == KernelKind::rbf) {
        if (!j.contains("gamma")) throw InvalidInput("config: rbf kernel needs gamma");
        k.gamma = get<double>(j, "gamma", "svm.kernel");
    }
    k.validate();
    return k;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j, "config",
               {"dataset_source", "flip", "methods", "n_splits", "master_seed", "train_fraction", "svm", "kmm",
                "n_prime", "cv", "threads", "record_wall_time"});
    ExperimentConfig c;
    if (j.contains("dataset_source")) {
        const json& d = j.at("dataset_source");
        if (d.is_string()) {
            const auto name = d.get<std::string>();
            if (name == "triangles") c.dataset_source.kind = DatasetSource::Kind::triangles;
            else if (name == "overlap_square" || name == "overlap") c.dataset_source.kind = DatasetSource::Kind::overlap_square;
            else throw InvalidInput("config: unknown dataset_source '" + name + "'");
        } else {
            check_keys(d, "dataset_source", {"kind", "csv", "n_pos", "n_neg", "n"});
            if (d.contains("csv")) {
                c.dataset_source.kind = DatasetSource::Kind::csv;
                std::filesystem::path p = get<std::string>(d, "csv", "dataset_source");
                c.dataset_source.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
            } else {
                const auto kind = get<std::string>(d, "kind", "dataset_source");
                if (kind == "triangles") c.dataset_source.kind = DatasetSource::Kind::triangles;
                else if (kind == "overlap_square" || kind == "overlap") c.dataset_source.kind = DatasetSource::Kind::overlap_square;
                else throw InvalidInput("config: unknown dataset_source kind '" + kind + "'");
            }
            if (d.contains("n_pos")) c.dataset_source.n_pos = get<std::size_t>(d, "n_pos", "dataset_source");
            if (d.contains("n_neg")) c.dataset_source.n_neg = get<std::size_t>(d, "n_neg", "dataset_source");
            if (d.contains("n")) c.dataset_source.n = get<std::size_t>(d, "n", "dataset_source");
        }
    }
    if (j.contains("flip")) {
        const json& f = j.at("flip");
        c.flip.clear();
        if (f.is_array()) {
            for (const auto& item : f) c.flip.push_back(flip_from_json(item));
        } else {
            c.flip.push_back(flip_from_json(f));
        }
    }
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) {
            if (!m.is_string()) throw InvalidInput("config: methods must be strings");
            c.methods.push_back(method_from_string(m.get<std::string>()));
        }
    }
    if (j.contains("n_splits")) c.n_splits = get<std::size_t>(j, "n_splits", "config");
    if (j.contains("master_seed")) c.master_seed = get<std::uint64_t>(j, "master_seed", "config");
    if (j.contains("train_fraction")) c.train_fraction = get<double>(j, "train_fraction", "config");
    if (j.contains("svm")) {
        const json& s = j.at("svm");
        check_keys(s, "svm", {"C", "kernel", "tol"});
        if (s.contains("C")) c.svm.C = get<double>(s, "C", "svm");
        if (s.contains("tol")) c.svm.tol = get<double>(s, "tol", "svm");
        if (s.contains("kernel") && !s.at("kernel").is_null()) c.svm.kernel = kernel_from_json(s.at("kernel"));
    }
    if (j.contains("kmm")) {
        const json& k = j.at("kmm");
        check_keys(k, "kmm", {"upper_bound_B", "epsilon", "max_iters", "tol"});
        if (k.contains("upper_bound_B")) c.kmm.upper_bound = get<double>(k, "upper_bound_B", "kmm");
        if (k.contains("epsilon") && !k.at("epsilon").is_null()) c.kmm.epsilon = get<double>(k, "epsilon", "kmm");
        if (k.contains("max_iters")) c.kmm.max_iterations = get<std::size_t>(k, "max_iters", "kmm");
        if (k.contains("tol")) c.kmm.tol = get<double>(k, "tol", "kmm");
    }
    if (j.contains("n_prime")) c.n_prime = get<std::size_t>(j, "n_prime", "config");
    if (j.contains("cv")) {
        const json& v = j.at("cv");
        check_keys(v, "cv", {"grid_lo", "grid_hi", "grid_step", "folds"});
        if (v.contains("grid_lo")) c.cv.grid_lo = get<double>(v, "grid_lo", "cv");
        if (v.contains("grid_hi")) c.cv.grid_hi = get<double>(v, "grid_hi", "cv");
        if (v.contains("grid_step")) c.cv.grid_step = get<double>(v, "grid_step", "cv");
        if (v.contains("folds")) c.cv.folds = get<std::size_t>(v, "folds", "cv");
    }
    if (j.contains("threads")) c.threads = get<unsigned>(j, "threads", "config");
    if (j.contains("record_wall_time")) c.record_wall_time = get<bool>(j, "record_wall_time", "config");
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    switch (c.dataset_source.kind) {
        case DatasetSource::Kind::triangles:
            j["dataset_source"] = {{"kind", "triangles"}, {"n_pos", c.dataset_source.n_pos}, {"n_neg", c.dataset_source.n_neg}};
            break;
        case DatasetSource::Kind::overlap_square:
            j["dataset_source"] = {{"kind", "overlap_square"}, {"n", c.dataset_source.n}};
            break;
        case DatasetSource::Kind::csv:
            j["dataset_source"] = {{"csv", c.dataset_source.path.string()}};
            break;
    }
    j["flip"] = json::array();
    for (const auto& f : c.flip) j["flip"].push_back(setting_name(f));
    j["methods"] = json::array();
    for (Method m : c.methods) j["methods"].push_back(to_string(m));
    j["n_splits"] = c.n_splits;
    j["master_seed"] = c.master_seed;
    j["train_fraction"] = c.train_fraction;
    j["svm"] = {{"C", c.svm.C}, {"tol", c.svm.tol}};
    if (c.svm.kernel) {
        j["svm"]["kernel"] = {{"kind", to_string(c.svm.kernel->kind)}};
        if (c.svm.kernel->kind == KernelKind::rbf) j["svm"]["kernel"]["gamma"] = c.svm.kernel->gamma;
    } else {
        j["svm"]["kernel"] = nullptr;
    }
    j["kmm"] = {{"upper_bound_B", c.kmm.upper_bound},
                {"epsilon", c.kmm.epsilon ? json(*c.kmm.epsilon) : json(nullptr)},
                {"max_iters", c.kmm.max_iterations},
                {"tol", c.kmm.tol}};
    j["n_prime"] = c.n_prime;
    j["cv"] = {{"grid_lo", c.cv.grid_lo}, {"grid_hi", c.cv.grid_hi}, {"grid_step", c.cv.grid_step}, {"folds", c.cv.folds}};
    j["threads"] = c.threads;
    j["record_wall_time"] = c.record_wall_time;
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("config: cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw InvalidInput("config: invalid JSON in '" + path.string() + "': " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json records_to_json(const std::vector<ResultRecord>& records) {
    json out = json::array();
    for (const auto& r : records) {
        json e;
        e["method"] = to_string(r.method);
        e["setting"] = r.setting;
        e["accuracy_mean"] = number_or_null(r.accuracy_mean);
        e["accuracy_std"] = number_or_null(r.accuracy_std);
        e["per_split"] = r.per_split;
        e["splits"] = r.splits;
        e["wall_time_s"] = r.wall_time_s;
        e["errors"] = json::array();
        for (const auto& err : r.errors) e["errors"].push_back({{"split", err.split}, {"message", err.message}});
        out.push_back(std::move(e));
    }
    return out;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    throw InvalidInput("unknown report format '" + name + "'");
}

namespace {

std::string percent(const json& v) {
    if (v.is_null()) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * v.get<double>();
    return os.str();
}

}  // namespace

std::string render_report(const json& summary, ReportFormat format) {
    if (!summary.contains("records") || !summary.at("records").is_array())
        throw InvalidInput("report: summary has no records array");
    const json& records = summary.at("records");
    if (format == ReportFormat::json) {
        json out = json::array();
        for (const auto& r : records)
            out.push_back({{"method", r.at("method")},
                           {"setting", r.at("setting")},
                           {"accuracy_mean", r.at("accuracy_mean")},
                           {"accuracy_std", r.at("accuracy_std")},
                           {"n_splits", r.at("per_split").size()},
                           {"n_errors", r.at("errors").size()}});
        return out.dump(2) + "\n";
    }
    if (format == ReportFormat::csv) {
        std::ostringstream os;
        os << "method,setting,accuracy_mean,accuracy_std,n_splits,n_errors\n";
        for (const auto& r : records) {
            const auto setting = r.at("setting").get<std::string>();
            const bool quote = setting.find(',') != std::string::npos;
            os << r.at("method").get<std::string>() << ',' << (quote ? "\"" + setting + "\"" : setting) << ','
               << (r.at("accuracy_mean").is_null() ? std::string() : r.at("accuracy_mean").dump()) << ','
               << (r.at("accuracy_std").is_null() ? std::string() : r.at("accuracy_std").dump()) << ','
               << r.at("per_split").size() << ',' << r.at("errors").size() << '\n';
        }
        return os.str();
    }
    // Markdown: one row per setting, one column per method, accuracies in percent.
    std::vector<std::string> settings, methods;
    std::map<std::pair<std::string, std::string>, std::string> cell;
    for (const auto& r : records) {
        const auto s = r.at("setting").get<std::string>(), m = r.at("method").get<std::string>();
        if (std::find(settings.begin(), settings.end(), s) == settings.end()) settings.push_back(s);
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
        std::string text = percent(r.at("accuracy_mean"));
        if (!r.at("accuracy_mean").is_null()) text += " ± " + percent(r.at("accuracy_std"));
        if (!r.at("errors").empty()) text += " (" + std::to_string(r.at("errors").size()) + " failed)";
        cell[{s, m}] = text;
    }
    std::ostringstream os;
    os << "| setting |";
    for (const auto& m : methods) os << ' ' << m << " |";
    os << "\n|---|";
    for (std::size_t k = 0; k < methods.size(); ++k) os << "---|";
    os << '\n';
    for (const auto& s : settings) {
        os << "| " << s << " |";
        for (const auto& m : methods) os << ' ' << cell[{s, m}] << " |";
        os << '\n';
    }
    return os.str();
}

}  // namespace pgpu
