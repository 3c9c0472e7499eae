#include "pgpu/kmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pgpu {

void KmmConfig::validate() const {
    if (!(upper_bound > 0.0)) throw InvalidInput("kmm: upper bound must be positive");
    if (epsilon && !(*epsilon >= 0.0 && *epsilon < 1.0))
        throw InvalidInput("kmm: epsilon must lie in [0, 1)");
    if (max_iterations == 0) throw InvalidInput("kmm: max_iterations must be positive");
    if (!(tol > 0.0)) throw InvalidInput("kmm: tol must be positive");
}

double KmmConfig::resolved_epsilon(std::size_t n_source) const {
    if (epsilon) return *epsilon;
    const double r = std::sqrt(static_cast<double>(n_source));
    return (r - 1.0) / r;
}

std::vector<double> project_box_sum(std::vector<double> v, double cap, double lo, double hi) {
    auto clipped_sum = [&](double shift) {
        double s = 0.0;
        for (double x : v) s += std::clamp(x - shift, 0.0, cap);
        return s;
    };
    const double s0 = clipped_sum(0.0);
    double shift = 0.0;
    if (s0 > hi || s0 < lo) {
        const double target = s0 > hi ? hi : lo;
        // sum is non-increasing in shift; bracket so that sum(a) >= target >= sum(b).
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        double a = *mn - cap, b = *mx;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            (clipped_sum(mid) >= target ? a : b) = mid;
        }
        // Take the side of the bracket that stays inside [lo, hi].
        shift = s0 > hi ? b : a;
    }
    for (double& x : v) x = std::clamp(x - shift, 0.0, cap);
    return v;
}

KmmProblem make_kmm_problem(const KernelSpec& kernel, const Matrix& target_X, const Matrix& source_X) {
    if (target_X.rows() == 0 || source_X.rows() == 0) throw InvalidInput("kmm: empty sample");
    if (target_X.cols() != source_X.cols()) throw InvalidInput("kmm: dimension mismatch");
    KmmProblem p;
    p.n_target = static_cast<std::size_t>(target_X.rows());
    p.source_gram = gram_matrix(kernel, source_X);
    p.cross_sums = gram_matrix(kernel, source_X, target_X).rowwise().sum();
    const double n = static_cast<double>(target_X.rows());
    p.target_mean_sq = gram_matrix(kernel, target_X).sum() / (n * n);
    return p;
}

namespace {

struct NegativeCurvature {};

double largest_eigenvalue(const Matrix& K) {
    const Eigen::Index m = K.rows();
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Vector w = K * v;
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (it > 5 && std::abs(next - lambda) <= 1e-10 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::abs(lambda);
}

KmmSolution run_solver(const Matrix& K, const KmmProblem& p, const KmmConfig& cfg) {
    const auto m = static_cast<std::size_t>(K.rows());
    const double md = static_cast<double>(m), nd = static_cast<double>(p.n_target);
    const double eps = cfg.resolved_epsilon(m);
    const double cap = cfg.upper_bound;
    // Keep the sum strictly inside the mean constraint despite rounding in sum / m.
    const double slack = std::min(1e-12 * md, eps * md / 2.0);
    const double lo = md * (1.0 - eps) + slack, hi = md * (1.0 + eps) - slack;
    if (lo > cap * md) throw Error("kmm: constraints infeasible (epsilon too small for upper bound)");

    const double quad_scale = 1.0 / (md * md);
    const Vector lin = p.cross_sums * (2.0 / (nd * md));
    auto objective = [&](const Vector& b, const Vector& Kb) {
        return b.dot(Kb) * quad_scale - b.dot(lin) + p.target_mean_sq;
    };
    auto to_vector = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    auto project = [&](const Vector& v) {
        return to_vector(project_box_sum(std::vector<double>(v.data(), v.data() + v.size()), cap, lo, hi));
    };

    const double lambda_max = largest_eigenvalue(K);
    const double L = std::max(2.0 * lambda_max * quad_scale * 1.05, 1e-300);

    Vector x = project(Vector::Ones(static_cast<Eigen::Index>(m)));
    Vector Kx = K * x;
    double Jx = objective(x, Kx);
    Vector y = x, Ky = Kx;
    double t = 1.0;

    KmmSolution sol;
    sol.objective_trace.reserve(std::min<std::size_t>(cfg.max_iterations, 1024));
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        const Vector grad = 2.0 * quad_scale * Ky - lin;
        const Vector z = project(y - grad / L);
        const Vector Kz = K * z;
        const Vector d = z - y;
        const double dd = d.squaredNorm();
        if (dd > 0.0 && d.dot(Kz - Ky) < -1e-9 * lambda_max * dd) throw NegativeCurvature{};
        const double step = d.lpNorm<Eigen::Infinity>();

        const Vector x_prev = x, Kx_prev = Kx;
        const double Jz = objective(z, Kz);
        if (Jz <= Jx) {
            x = z;
            Kx = Kz;
            Jx = Jz;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double a = t / t_next, c = (t - 1.0) / t_next;
        y = x + a * (z - x) + c * (x - x_prev);
        Ky = Kx + a * (Kz - Kx) + c * (Kx - Kx_prev);
        t = t_next;

        sol.objective_trace.push_back(Jx);
        sol.iterations = it + 1;
        if (step <= cfg.tol) {
            sol.converged = true;
            break;
        }
    }
    sol.weights.beta.assign(x.data(), x.data() + x.size());
    sol.objective = Jx;
    return sol;
}

}  // namespace

KmmSolution solve_kmm_problem(const KmmProblem& problem, const KmmConfig& config) {
    config.validate();
    const auto m = problem.source_gram.rows();
    if (m == 0 || problem.source_gram.cols() != m || problem.cross_sums.size() != m)
        throw InvalidInput("kmm: inconsistent problem dimensions");
    if (problem.n_target == 0) throw InvalidInput("kmm: empty target sample");
    try {
        return run_solver(problem.source_gram, problem, config);
    } catch (const NegativeCurvature&) {
    }
    Matrix ridged = problem.source_gram;
    ridged.diagonal().array() += 1e-8;
    try {
        KmmSolution sol = run_solver(ridged, problem, config);
        sol.ridge_applied = true;
        return sol;
    } catch (const NegativeCurvature&) {
        throw Error("kmm: source Gram matrix is not positive semidefinite, even with ridge");
    }
}

KmmSolution solve_kmm(const KernelSpec& kernel, const Matrix& target_X, const Matrix& source_X,
                      const KmmConfig& config) {
    config.validate();
    return solve_kmm_problem(make_kmm_problem(kernel, target_X, source_X), config);
}

}  // namespace pgpu
