#include "pgpu/gap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pgpu {

GapEstimate observed_gap(std::span<const double> p_pos) {
    GapEstimate out;
    out.gaps.reserve(p_pos.size());
    for (double p : p_pos) {
        if (!(p >= 0.0 && p <= 1.0))
            throw InvalidInput("observed_gap: probability " + std::to_string(p) + " outside [0, 1]");
        out.gaps.push_back(2.0 * p - 1.0);
    }
    return out;
}

double forward_gap(double true_gap, double rho_plus) {
    return (1.0 - rho_plus) * (true_gap + 1.0) - 1.0;
}

double FlipRateSpec::rate(double gap) const {
    if (gap < 0.0) return 0.0;
    gap = std::min(gap, 1.0);
    double rho = 0.0;
    switch (kind) {
        case Kind::inverse: {
            const double denom = alpha + gap * (1.0 + beta);
            rho = denom > 0.0 ? alpha / denom : 0.0;
            break;
        }
        case Kind::linear:
            rho = alpha * (1.0 - gap);
            break;
        case Kind::constant:
            rho = alpha;
            break;
    }
    return std::clamp(rho, 0.0, 1.0);
}

void FlipRateSpec::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidInput("flip rate: alpha must be finite and nonnegative");
    if (kind == Kind::inverse && (!(beta > -1.0) || !std::isfinite(beta)))
        throw InvalidInput("flip rate: beta must be finite and greater than -1");
}

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double parse_number(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        throw InvalidInput("flip rate: cannot parse number '" + s + "' in '" + context + "'");
    return v;
}

}  // namespace

std::string FlipRateSpec::to_string() const {
    switch (kind) {
        case Kind::inverse:
            return "inverse:" + format_number(alpha) + "," + format_number(beta);
        case Kind::linear:
            return "linear:" + format_number(alpha);
        case Kind::constant:
            break;
    }
    return "constant:" + format_number(alpha);
}

FlipRateSpec FlipRateSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw InvalidInput("flip rate: expected kind:params, got '" + text + "'");
    const std::string kind = text.substr(0, colon), args = text.substr(colon + 1);
    FlipRateSpec spec;
    if (kind == "inverse") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw InvalidInput("flip rate: inverse needs alpha,beta in '" + text + "'");
        spec = inverse(parse_number(args.substr(0, comma), text), parse_number(args.substr(comma + 1), text));
    } else if (kind == "linear") {
        spec = linear(parse_number(args, text));
    } else if (kind == "constant") {
        spec = constant(parse_number(args, text));
    } else {
        throw InvalidInput("flip rate: unknown kind '" + kind + "'");
    }
    spec.validate();
    return spec;
}

std::vector<FlipRateSpec> benchmark_flip_settings() {
    std::vector<FlipRateSpec> out;
    for (double a : {0.1, 0.2, 0.3})
        for (double b : {0.5, 1.0, 1.5}) out.push_back(FlipRateSpec::inverse(a, b));
    for (double a : {0.2, 0.4, 0.6, 0.8, 1.0}) out.push_back(FlipRateSpec::linear(a));
    for (double a : {0.1, 0.2, 0.3}) out.push_back(FlipRateSpec::constant(a));
    return out;
}

double estimate_boundary_min(const GapEstimate& gaps, const Labels& observed, std::size_t n_prime) {
    if (gaps.gaps.size() != observed.size()) throw InvalidInput("estimate_boundary: length mismatch");
    if (n_prime == 0) throw InvalidInput("estimate_boundary: n_prime must be positive");
    std::vector<double> pos;
    for (std::size_t i = 0; i < observed.size(); ++i)
        if (observed[i] == 1) pos.push_back(gaps.gaps[i]);
    if (pos.size() < n_prime)
        throw InvalidInput("estimate_boundary: " + std::to_string(pos.size()) +
                           " observed positives, need " + std::to_string(n_prime));
    std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_prime), pos.end());
    const double mean =
        std::accumulate(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_prime), 0.0) /
        static_cast<double>(n_prime);
    return std::clamp(mean, -1.0 + kBoundaryMargin, -kBoundaryMargin);
}

IndexList RelabelResult::selected() const {
    IndexList out = positive_idx;
    out.insert(out.end(), negative_idx.begin(), negative_idx.end());
    return out;
}

Labels RelabelResult::selected_labels() const {
    Labels out(positive_idx.size(), 1);
    out.resize(positive_idx.size() + negative_idx.size(), -1);
    return out;
}

RelabelResult relabel(const GapEstimate& gaps, const Labels& observed, double boundary) {
    if (gaps.gaps.size() != observed.size()) throw InvalidInput("relabel: length mismatch");
    if (!(boundary > -1.0 && boundary < 0.0))
        throw InvalidInput("relabel: boundary " + std::to_string(boundary) + " outside (-1, 0)");
    require_binary(observed, "relabel");
    RelabelResult out;
    out.boundary = boundary;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double g = gaps.gaps[i];
        if (observed[i] == 1 || g > 0.0) out.positive_idx.push_back(i);
        else if (g <= boundary) out.negative_idx.push_back(i);
        else out.discarded_idx.push_back(i);
    }
    return out;
}

std::vector<double> boundary_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidInput("boundary_grid: need step > 0 and hi >= lo");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    // Snap to 1e-9 so that decimal steps land on the nearest double of the decimal value.
    for (long k = 0; k < count; ++k)
        grid.push_back(std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9);
    return grid;
}

std::size_t select_best_candidate(std::span<const double> scores) {
    std::size_t best = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) continue;
        if (best == scores.size() || scores[i] > scores[best]) best = i;
    }
    if (best == scores.size()) throw Error("boundary search: every candidate was degenerate");
    return best;
}

}  // namespace pgpu
