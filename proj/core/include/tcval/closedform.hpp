#pragma once

#include <functional>
#include <span>
#include <variant>

#include "tcval/model.hpp"
#include "tcval/principles.hpp"

namespace tcval {

/// E[h(y_T)] under an analytic transition law. `kinks` are states where h is
/// not smooth; the quadrature breaks its panels there.
double expectation(const TransitionLaw& law, const std::function<double(double)>& h,
                   std::span<const double> kinks = {});

/// E_t[f(y_T) | y_t = y]. Throws UnsupportedError for models without an
/// analytic law.
double expected_payoff(const DiffusionModel& model, const Payoff& payoff, double t, double y,
                       double T);

/// Throws IntegrabilityError if E[exp(c f(y_T))] may diverge for c > 0,
/// judged from the payoff growth class against the law's tails.
void check_exponential_integrability(const TransitionLaw& law, const Payoff& payoff);

struct FlatRiskAversion {
    double alpha;
};

struct BenchmarkRiskAversion {
    double gamma;
    double X0;
    double r;
};

using RiskAversion = std::variant<FlatRiskAversion, BenchmarkRiskAversion>;

/// Flat: (1/alpha) ln E[e^{alpha f}].
/// Benchmark: (X0 e^{rt}/gamma) ln E[e^{gamma f / (X0 e^{rT})}].
/// Below an effective exponent of 1e-6 the series E f + c/2 Var f is used.
double exp_indifference_price(const DiffusionModel& model, const Payoff& payoff,
                              const RiskAversion& risk, double t, double y, double T);

/// e^{-r(T-t)} (E[f^{1+gamma}])^{1/(1+gamma)} for a payoff declared positive.
double power_price(const DiffusionModel& model, const Payoff& payoff, double gamma, double r,
                   double t, double y, double T);

/// e^{-r(T-t)} E[f] under the model with drift a + beta b (increasing f)
/// or a - beta b (decreasing f).
double stddev_price(const DiffusionModel& model, const Payoff& payoff, double beta, double r,
                    double t, double y, double T);

/// stddev_price with beta = delta * inverse normal CDF at q.
double coc_price(const DiffusionModel& model, const Payoff& payoff, double delta, double q,
                 double r, double t, double y, double T);

/// e^{rt} v^-1(E[v(f / e^{rT})]).
double mean_value_price(const DiffusionModel& model, const Payoff& payoff, const Distortion& v,
                        double r, double t, double y, double T);

/// Closed-form limit of the iterated principle: the indifference, power,
/// mean-value or drift-adjusted price matching principle.kind.
double closed_form_price(const DiffusionModel& model, const Payoff& payoff,
                         const PrincipleSpec& principle, double t, double y, double T);

}  // namespace tcval
