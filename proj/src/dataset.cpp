#include "pgpu/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

namespace pgpu {

void PUDataset::validate() const {
    const auto n = s.size();
    if (static_cast<std::size_t>(X.rows()) != n) throw InvalidInput("dataset: X and s lengths differ");
    require_binary(s, "dataset observed labels");
    if (y) {
        if (y->size() != n) throw InvalidInput("dataset: y and s lengths differ");
        require_binary(*y, "dataset latent labels");
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] == 1 && (*y)[i] != 1)
                throw InvalidInput("dataset: row " + std::to_string(i) +
                                   " is an observed positive with a negative latent label");
    }
    if (gap_truth && gap_truth->size() != n) throw InvalidInput("dataset: gap_truth length differs");
}

PUDataset PUDataset::subset(const IndexList& rows) const {
    PUDataset out;
    out.X = select_rows(X, rows);
    out.s = select(s, rows);
    if (y) out.y = select(*y, rows);
    if (gap_truth) out.gap_truth = select(*gap_truth, rows);
    return out;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
    return v;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw InvalidInput("csv line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        fail(line, "invalid number '" + std::string(field) + "'");
    return v;
}

int parse_label(std::string_view field, std::size_t line, const char* column) {
    field = trim(field);
    if (field == "1" || field == "+1") return 1;
    if (field == "-1") return -1;
    fail(line, std::string("label ") + column + " must be 1 or -1, got '" + std::string(field) + "'");
}

}  // namespace

void save_csv(const PUDataset& data, const std::filesystem::path& path) {
    data.validate();
    std::string out;
    for (std::size_t k = 1; k <= data.dim(); ++k) out += "x" + std::to_string(k) + ",";
    out += "s,y\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (Eigen::Index k = 0; k < data.X.cols(); ++k) {
            append_double(out, data.X(static_cast<Eigen::Index>(i), k));
            out += ',';
        }
        out += data.s[i] == 1 ? "1," : "-1,";
        if (data.y) out += (*data.y)[i] == 1 ? "1" : "-1";
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << out;
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

PUDataset load_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(f, line)) fail(1, "missing header");
    const auto header = split_fields(trim(line));
    if (header.size() < 3 || trim(header[header.size() - 2]) != "s" || trim(header.back()) != "y")
        fail(1, "header must be x1,...,xd,s,y");
    const std::size_t d = header.size() - 2;
    for (std::size_t k = 0; k < d; ++k)
        if (trim(header[k]) != "x" + std::to_string(k + 1))
            fail(1, "expected column x" + std::to_string(k + 1));

    std::vector<double> values;
    Labels s, y;
    std::size_t with_y = 0, line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty()) continue;
        const auto fields = split_fields(view);
        if (fields.size() != d + 2)
            fail(line_no, "expected " + std::to_string(d + 2) + " fields, got " + std::to_string(fields.size()));
        for (std::size_t k = 0; k < d; ++k) values.push_back(parse_double(fields[k], line_no));
        s.push_back(parse_label(fields[d], line_no, "s"));
        if (trim(fields[d + 1]).empty()) {
            y.push_back(0);
        } else {
            y.push_back(parse_label(fields[d + 1], line_no, "y"));
            ++with_y;
            if (s.back() == 1 && y.back() != 1) fail(line_no, "observed positive with latent label -1");
        }
        if (with_y != 0 && with_y != s.size()) fail(line_no, "latent label y must be given on every row or none");
    }
    PUDataset data;
    const auto n = static_cast<Eigen::Index>(s.size());
    data.X = Eigen::Map<const Matrix>(values.data(), n, static_cast<Eigen::Index>(d));
    data.s = std::move(s);
    if (with_y > 0) data.y = std::move(y);
    return data;
}

std::pair<IndexList, IndexList> split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (n < 4) throw InvalidInput("split: need at least 4 examples");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidInput("split: train fraction must lie in (0, 1)");
    auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    IndexList perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    IndexList train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    IndexList test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::pair<PUDataset, PUDataset> split(const PUDataset& data, double train_fraction, std::uint64_t seed) {
    auto [train, test] = split_indices(data.size(), train_fraction, seed);
    return {data.subset(train), data.subset(test)};
}

}  // namespace pgpu
