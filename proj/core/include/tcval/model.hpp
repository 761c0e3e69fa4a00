#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcval {

using Coefficient = std::function<double(double t, double y)>;
using ParameterSet = std::map<std::string, double>;

enum class ModelKind { ABM, OU, GBM, Custom };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Law of y(T) given y(t): y(T) = location + scale * Z (Gaussian) or
/// y(T) = exp(location + scale * Z) (Lognormal), Z standard normal.
struct TransitionLaw {
    enum class Family { Gaussian, Lognormal };

    Family family = Family::Gaussian;
    double location = 0.0;
    double scale = 0.0;

    double mean() const;
    double variance() const;
    /// Maps a standard normal draw to the terminal state.
    double state(double z) const;
    /// Inverse of state(); used to place payoff kinks in the Gaussian core.
    std::optional<double> normal_score(double y) const;
};

/// dy = a(t, y) dt + b(t, y) dW.
///
/// Built-in kinds carry an analytic transition law. Custom models carry only
/// their coefficient functions plus a declared Lipschitz bound that sizes the
/// explicit-term stability check in the PDE solver.
class DiffusionModel {
public:
    static DiffusionModel abm(double drift, double diffusion);
    static DiffusionModel ou(double kappa, double theta, double diffusion);
    static DiffusionModel gbm(double mu, double sigma);
    static DiffusionModel custom(Coefficient drift, Coefficient diffusion, double lipschitz_bound);

    ModelKind kind() const noexcept { return kind_; }
    double drift(double t, double y) const { return drift_(t, y); }
    double diffusion(double t, double y) const { return diffusion_(t, y); }
    const ParameterSet& parameters() const noexcept { return params_; }
    std::optional<double> lipschitz_bound() const noexcept { return lipschitz_; }

    bool has_transition() const noexcept { return kind_ != ModelKind::Custom; }
    /// Analytic law of y(T) | y(t) = y; empty for Custom models.
    std::optional<TransitionLaw> transition(double t, double y, double T) const;

    /// Model with drift a(t, y) + lambda * b(t, y). Built-in kinds stay in
    /// their analytic family (ABM drift shift, OU mean-level shift, GBM mu shift).
    DiffusionModel with_drift_shift(double lambda) const;

    /// Standard deviation scale of y(T) | y(t0) = y used to size grids; for
    /// GBM it is the log-state scale.
    double terminal_scale(double t0, double y, double T) const;

private:
    friend DiffusionModel make_model(ModelKind kind, const ParameterSet& params);
    DiffusionModel() = default;

    ModelKind kind_ = ModelKind::Custom;
    Coefficient drift_;
    Coefficient diffusion_;
    ParameterSet params_;
    std::optional<double> lipschitz_;
};

/// Builds a built-in model from named parameters:
///   ABM: drift, diffusion     OU: kappa, theta, diffusion     GBM: mu, sigma
/// Unknown, missing or invalid fields raise ConfigError naming the field.
DiffusionModel make_model(ModelKind kind, const ParameterSet& params);

// ---------------------------------------------------------------------------

enum class PayoffKind { Linear, Constant, Call, Put, Power, PiecewiseLinear };
enum class Monotonicity { Increasing, Decreasing, NonMonotone };

std::string to_string(PayoffKind kind);
std::string to_string(Monotonicity m);
PayoffKind payoff_kind_from_string(const std::string& name);
Monotonicity monotonicity_from_string(const std::string& name);

/// How fast f(y) can grow towards +infinity in one tail of y.
enum class Growth { Bounded, Linear, Superlinear };

/// Terminal claim f(y(T)).
///
/// Parameters by kind:
///   Linear          {slope, intercept}
///   Constant        {c}
///   Call, Put       {strike}
///   Power           {exponent}               f = y^exponent, y > 0 for non-integer exponents
///   PiecewiseLinear {x0, v0, x1, v1, ...}    knots with increasing x, flat beyond the ends
class Payoff {
public:
    Payoff(PayoffKind kind, std::vector<double> params, Monotonicity monotonicity,
           bool positive = false);

    static Payoff linear(double slope, double intercept = 0.0);
    static Payoff constant(double c);
    static Payoff call(double strike);
    static Payoff put(double strike);
    static Payoff power(double exponent);
    static Payoff piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                   Monotonicity monotonicity);

    PayoffKind kind() const noexcept { return kind_; }
    const std::vector<double>& params() const noexcept { return params_; }
    Monotonicity monotonicity() const noexcept { return monotonicity_; }
    bool positive() const noexcept { return positive_; }
    Payoff with_positive(bool flag) const;

    double operator()(double y) const;

    /// Kinks of f, where quadrature panels must break.
    std::vector<double> kinks() const;
    Growth upper_growth() const;  // as y -> +inf
    Growth lower_growth() const;  // as y -> -inf

private:
    PayoffKind kind_;
    std::vector<double> params_;
    Monotonicity monotonicity_;
    bool positive_;
};

/// f(y) on each node. Verifies the declared monotonicity on adjacent nodes
/// and, with the positivity flag, that every value is > 0.
std::vector<double> evaluate_payoff(const Payoff& payoff, std::span<const double> y_nodes);

/// Checks a row of terminal values against a declared monotonicity.
bool satisfies(Monotonicity m, std::span<const double> values);

}  // namespace tcval
