#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tcval {

struct Outcome {
    double value;
    double probability;
};

/// Finite distribution with strictly positive probabilities summing to one
/// (within 1e-12).
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<Outcome> outcomes);
    static DiscreteDistribution point(double value);

    const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
    std::size_t size() const noexcept { return outcomes_.size(); }

    double mean() const;
    /// Central second moment, computed two-pass and clamped at zero.
    double variance() const;
    double stddev() const;
    double min_value() const;
    double max_value() const;

    /// Same probabilities, values mapped through fn.
    template <class Fn>
    DiscreteDistribution map(Fn&& fn) const {
        std::vector<Outcome> out = outcomes_;
        for (auto& o : out) o.value = fn(o.value);
        return DiscreteDistribution(std::move(out), Unchecked{});
    }

private:
    struct Unchecked {};
    DiscreteDistribution(std::vector<Outcome> outcomes, Unchecked) : outcomes_(std::move(outcomes)) {}

    std::vector<Outcome> outcomes_;
};

/// Convex increasing distortion v for the mean-value principle, with its
/// first two derivatives and the open interval where it is defined.
class Distortion {
public:
    using Fn = std::function<double(double)>;

    Distortion(std::string name, Fn value, Fn first, Fn second, double domain_lo, double domain_hi);

    static Distortion linear();
    /// v(x) = exp(a x), a > 0.
    static Distortion exponential(double a);
    /// v(x) = x^(1 + gamma) on x > 0, gamma >= 0.
    static Distortion power(double gamma);

    const std::string& name() const noexcept { return name_; }
    double operator()(double x) const { return value_(x); }
    double derivative(double x) const { return first_(x); }
    double second_derivative(double x) const { return second_(x); }
    /// v''(x) / v'(x).
    double local_risk_aversion(double x) const { return second_(x) / first_(x); }
    double domain_lo() const noexcept { return lo_; }
    double domain_hi() const noexcept { return hi_; }
    bool in_domain(double x) const { return x > lo_ && x < hi_; }

    /// Solves v(x) = target for x in [lo, hi] by safeguarded Newton with
    /// bisection fallback, to relative tolerance 1e-12. Throws DomainError
    /// when target lies outside [v(lo), v(hi)].
    double inverse(double target, double lo, double hi) const;

    /// Samples v on its domain and checks v' > 0, v'' >= 0.
    void check_shape() const;

private:
    std::string name_;
    Fn value_, first_, second_;
    double lo_, hi_;
};

enum class PrincipleKind {
    Variance,
    VarianceDiscounted,
    CurrentPriceBenchmark,
    MeanValue,
    StdDev,
    CostOfCapital
};

std::string to_string(PrincipleKind kind);
PrincipleKind principle_kind_from_string(const std::string& name);

/// One-step valuation operator plus its per-annum risk parameters.
struct PrincipleSpec {
    PrincipleKind kind = PrincipleKind::Variance;
    double alpha = 0.0;  // absolute risk aversion, 1/currency
    double gamma = 0.0;  // relative risk aversion
    double X0 = 1.0;     // benchmark initial wealth
    double r = 0.0;      // continuously compounded rate
    double beta = 0.0;   // std-dev loading per sqrt(year)
    double delta = 0.0;  // cost-of-capital rate per year
    double q = 0.995;    // VaR confidence level
    std::optional<Distortion> v;

    static PrincipleSpec variance(double alpha);
    static PrincipleSpec variance_discounted(double gamma, double X0, double r);
    static PrincipleSpec current_price_benchmark(double gamma, double r);
    static PrincipleSpec mean_value(Distortion v, double r);
    static PrincipleSpec stddev(double beta, double r);
    static PrincipleSpec cost_of_capital(double delta, double q, double r);

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// E[X] + alpha/2 Var[X].
double variance_step(const DiscreteDistribution& dist, double alpha);

/// exp(-r dt) (E[X] + gamma / (2 X0 exp(r (t + dt))) Var[X]).
double variance_discounted_step(const DiscreteDistribution& dist, double gamma, double X0, double r,
                                double t, double dt);

/// exp(-r dt) (E[X] + gamma/2 Var[X] / E[X]); requires E[X] > 0.
double current_price_benchmark_step(const DiscreteDistribution& dist, double gamma, double r,
                                    double dt);

/// exp(r t) v^-1(E[v(X / exp(r (t + dt)))]).
double mean_value_step(const DiscreteDistribution& dist, const Distortion& v, double r, double t,
                       double dt);

/// exp(-r dt) (E[X] + beta sqrt(dt) sd[X]).
double stddev_step(const DiscreteDistribution& dist, double beta, double r, double dt);

/// Upper q-quantile of X - E[X]: inf{x : P(X - E[X] <= x) > q}.
///
/// With the quadrinomial tree the CDF reaches q exactly at the inner node;
/// the strict inequality (evaluated with a 1e-12 probability slack) makes
/// the quantile land on the outer node.
double var_quantile(const DiscreteDistribution& dist, double q);

/// exp(-r dt) (E[X] + delta sqrt(dt) var_quantile(X, q)).
double coc_step(const DiscreteDistribution& dist, double delta, double q, double r, double dt);

/// Dispatches to the step operator named by spec.kind. `t` is the time at
/// which the step is valued, `dt` the step to the children.
double apply_step(const PrincipleSpec& spec, const DiscreteDistribution& dist, double t, double dt);

}  // namespace tcval
