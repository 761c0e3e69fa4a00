#include "tcval/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tcval/errors.hpp"

namespace tcval {

namespace {

constexpr double kRelTol = 1e-10;

QuadratureRule build_hermite(std::size_t n) {
    // Golub-Welsch eigenvalues of the physicists' Jacobi matrix seed a Newton
    // polish on the orthonormal recurrence, which also yields the weights.
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = std::sqrt(0.5 * static_cast<double>(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& guess = solver.eigenvalues();

    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const double nn = static_cast<double>(n);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = guess[static_cast<Eigen::Index>(i)];
        double pp = 0.0;
        for (int iter = 0; iter < 8; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jj = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * nn) * p2;
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        rule.nodes[i] = std::numbers::sqrt2 * z;
        rule.weights[i] = 2.0 / (pp * pp) / std::sqrt(std::numbers::pi);
    }
    return rule;
}

QuadratureRule build_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jj = static_cast<double>(j);
                p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
            }
            pp = nn * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-16) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

template <class Builder>
const QuadratureRule& cached(std::map<std::size_t, std::unique_ptr<QuadratureRule>>& cache,
                             std::mutex& mutex, std::size_t n, Builder build) {
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(build(n));
    return *slot;
}

struct Estimate {
    double value;
    double magnitude;  // integral of |h|
};

Estimate hermite_estimate(const std::function<double(double)>& h, std::size_t n) {
    const auto& rule = gauss_hermite_normal(n);
    Estimate e{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double v = h(rule.nodes[i]);
        e.value += rule.weights[i] * v;
        e.magnitude += rule.weights[i] * std::abs(v);
    }
    return e;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

Estimate panel_estimate(const std::function<double(double)>& h, std::span<const double> edges,
                        std::size_t panels_per_segment) {
    const auto& rule = gauss_legendre(16);
    Estimate e{0.0, 0.0};
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double a = edges[s], b = edges[s + 1];
        const double width = (b - a) / static_cast<double>(panels_per_segment);
        for (std::size_t p = 0; p < panels_per_segment; ++p) {
            const double lo = a + width * static_cast<double>(p);
            const double half = 0.5 * width;
            const double mid = lo + half;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double z = mid + half * rule.nodes[i];
                const double v = h(z) * phi(z);
                e.value += half * rule.weights[i] * v;
                e.magnitude += half * rule.weights[i] * std::abs(v);
            }
        }
    }
    return e;
}

bool converged(const Estimate& coarse, const Estimate& fine) {
    const double scale = std::max(std::abs(fine.value), fine.magnitude);
    return std::abs(fine.value - coarse.value) <= kRelTol * scale;
}

double panel_expectation(const std::function<double(double)>& h,
                         std::span<const double> breakpoints) {
    // Truncate where |h| phi is negligible relative to the bulk.
    double bulk = 0.0;
    for (double z = -3.0; z <= 3.0; z += 0.5) bulk = std::max(bulk, std::abs(h(z)) * phi(z));
    auto negligible = [&](double z) {
        return std::abs(h(z)) * phi(z) * std::abs(z) <= 1e-18 * std::max(bulk, 1e-300);
    };
    double lo = -10.0, hi = 10.0;
    while (!negligible(lo) && lo > -60.0) lo -= 5.0;
    while (!negligible(hi) && hi < 60.0) hi += 5.0;

    std::vector<double> edges{lo};
    std::vector<double> inside(breakpoints.begin(), breakpoints.end());
    std::sort(inside.begin(), inside.end());
    for (double b : inside) {
        if (b > edges.back() && b < hi) edges.push_back(b);
    }
    edges.push_back(hi);

    Estimate coarse = panel_estimate(h, edges, 1);
    for (std::size_t panels = 2; panels <= 1024; panels *= 2) {
        Estimate fine = panel_estimate(h, edges, panels);
        if (converged(coarse, fine)) return fine.value;
        coarse = fine;
    }
    return coarse.value;
}

}  // namespace

const QuadratureRule& gauss_hermite_normal(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, build_hermite);
}

const QuadratureRule& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, build_legendre);
}

double normal_expectation(const std::function<double(double)>& h,
                          std::span<const double> breakpoints) {
    if (!breakpoints.empty()) return panel_expectation(h, breakpoints);
    Estimate coarse = hermite_estimate(h, 16);
    for (std::size_t n = 32; n <= 256; n *= 2) {
        Estimate fine = hermite_estimate(h, n);
        if (!std::isfinite(fine.value)) throw IntegrabilityError("quadrature produced a non-finite value");
        if (converged(coarse, fine)) return fine.value;
        coarse = fine;
    }
    // Slowly converging smooth integrand: fall back to panels.
    return panel_expectation(h, {});
}

}  // namespace tcval
