#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tcval/errors.hpp"
#include "tcval/normal.hpp"
#include "tcval/quadrature.hpp"

namespace {

using namespace tcval;

TEST(Normal, CdfReferenceValues) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    // erfc-based reference values.
    EXPECT_NEAR(normal_cdf(1.0), 0.841344746068542948, 1e-15);
    EXPECT_NEAR(normal_cdf(-2.0), 0.0227501319481792072, 1e-16);
    EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(Normal, InverseMatchesHighPrecisionQuantiles) {
    // Quantiles from an independent 30-digit evaluation.
    EXPECT_NEAR(inverse_normal_cdf(0.995), 2.5758293035489004, 1e-12);
    EXPECT_NEAR(inverse_normal_cdf(0.99), 2.3263478740408408, 1e-12);
    EXPECT_NEAR(inverse_normal_cdf(0.975), 1.9599639845400538, 1e-12);
    EXPECT_NEAR(inverse_normal_cdf(0.9), 1.2815515655446004, 1e-12);
    EXPECT_DOUBLE_EQ(inverse_normal_cdf(0.5), 0.0);
}

TEST(Normal, InverseRoundTripsAcrossTheUnitInterval) {
    for (double p = 1e-10; p < 1.0; p = p < 0.5 ? p * 3.0 : 1.0 - (1.0 - p) / 3.0) {
        const double z = inverse_normal_cdf(p);
        const double back = p < 0.5 ? normal_cdf(z) : 1.0 - normal_cdf(-z);
        EXPECT_NEAR(back / p, 1.0, 1e-12) << "p=" << p;
        if (1.0 - p < 1e-10) break;
    }
}

TEST(Normal, InverseRejectsOutOfRange) {
    EXPECT_THROW(inverse_normal_cdf(0.0), DomainError);
    EXPECT_THROW(inverse_normal_cdf(1.0), DomainError);
    EXPECT_THROW(inverse_normal_cdf(-0.1), DomainError);
}

TEST(Quadrature, HermiteRuleIntegratesNormalMoments) {
    for (std::size_t n : {16u, 32u, 64u, 128u, 256u}) {
        const auto& rule = gauss_hermite_normal(n);
        double m0 = 0.0, m2 = 0.0, m4 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rule.nodes[i], w = rule.weights[i];
            m0 += w;
            m1 += w * x;
            m2 += w * x * x;
            m4 += w * x * x * x * x;
        }
        EXPECT_NEAR(m0, 1.0, 1e-13) << n;
        EXPECT_NEAR(m1, 0.0, 1e-13) << n;
        EXPECT_NEAR(m2, 1.0, 1e-12) << n;
        EXPECT_NEAR(m4, 3.0, 1e-11) << n;
    }
}

TEST(Quadrature, LegendreRuleIsExactForPolynomials) {
    const auto& rule = gauss_legendre(16);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        sum += rule.weights[i] * (std::pow(x, 30) + 3.0 * x * x);
    }
    EXPECT_NEAR(sum, 2.0 / 31.0 + 2.0, 1e-14);
}

TEST(Quadrature, SmoothExpectationOfExponential) {
    // E[e^{aZ}] = e^{a^2/2}.
    for (double a : {0.1, 1.0, 2.5}) {
        const double got = normal_expectation([a](double z) { return std::exp(a * z); });
        EXPECT_NEAR(got / std::exp(0.5 * a * a), 1.0, 1e-12) << a;
    }
}

TEST(Quadrature, KinkedExpectationUsesPanels) {
    // E[max(Z - k, 0)] = phi(k) - k (1 - Phi(k)).
    for (double k : {-1.0, 0.0, 0.7, 2.0}) {
        const std::vector<double> kinks{k};
        const double got =
            normal_expectation([k](double z) { return std::max(z - k, 0.0); }, kinks);
        const double want = normal_pdf(k) - k * (1.0 - normal_cdf(k));
        EXPECT_NEAR(got, want, 1e-11) << k;
    }
}

TEST(Quadrature, ZeroMeanIntegrandTerminates) {
    EXPECT_NEAR(normal_expectation([](double z) { return z; }), 0.0, 1e-14);
}

}  // namespace
