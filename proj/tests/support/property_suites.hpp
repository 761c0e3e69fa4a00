#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace tcval::testing {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool passed() const { return cases > 0 && failures == 0; }
};

/// step(X + c) = step(X) + c at r = 0 for Variance, StdDev, CostOfCapital
/// and exponential MeanValue.
SuiteResult cash_additivity_suite(std::size_t cases, std::uint64_t seed);

/// Every step with nonnegative loadings is at least the discounted mean.
SuiteResult loading_nonnegativity_suite(std::size_t cases, std::uint64_t seed);

/// stddev_step(lambda X) = lambda stddev_step(X) at r = 0.
SuiteResult positive_homogeneity_suite(std::size_t cases, std::uint64_t seed);

/// f1 <= f2 implies pi1 <= pi2 for PDE solves with every generator kind.
SuiteResult comparison_principle_suite(std::size_t cases, std::uint64_t seed);

/// Inducting T -> s and then s -> t0 reproduces the direct rows bit for bit.
SuiteResult time_consistency_suite(std::size_t cases, std::uint64_t seed);

/// var_quantile against a sort-and-scan oracle on up to 64 atoms.
SuiteResult var_quantile_oracle_suite(std::size_t cases, std::uint64_t seed);

/// Lattice rows inherit the payoff's monotonicity (ABM, nonnegative loadings).
SuiteResult lattice_monotone_rows_suite(std::size_t cases, std::uint64_t seed);

/// Lattice surfaces are nondecreasing in alpha, beta and delta.
SuiteResult loading_monotonicity_suite(std::size_t cases, std::uint64_t seed);

/// Exponential mean-value minus variance step shrinks at least
/// quadratically with the spread.
SuiteResult small_risk_suite(std::size_t cases, std::uint64_t seed);

}  // namespace tcval::testing
