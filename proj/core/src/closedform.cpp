#include "tcval/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "tcval/errors.hpp"
#include "tcval/normal.hpp"
#include "tcval/quadrature.hpp"

namespace tcval {

namespace {

constexpr double kSeriesThreshold = 1e-6;

TransitionLaw law_of(const DiffusionModel& model, double t, double y, double T) {
    if (!(T >= t)) throw ConfigError("T", "horizon must not precede t");
    auto law = model.transition(t, y, T);
    if (!law) {
        throw UnsupportedError("closed form needs an analytic transition law; model is " +
                               to_string(model.kind()));
    }
    return *law;
}

std::vector<double> payoff_kinks(const Payoff& payoff) { return payoff.kinks(); }

double checked(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw IntegrabilityError(std::string(what) + " is not finite");
    }
    return value;
}

/// ln E[e^{c f}] for c > 0, shifted by a reference payoff value for range.
double log_mgf(const TransitionLaw& law, const Payoff& payoff, double c) {
    const double f0 = payoff(law.state(0.0));
    const auto kinks = payoff_kinks(payoff);
    const double m = expectation(
        law, [&](double s) { return std::exp(c * (payoff(s) - f0)); }, kinks);
    checked(m, "E[exp(c f)]");
    if (!(m > 0.0)) throw NumericalError("exponential moment underflowed");
    return c * f0 + std::log(m);
}

/// (1/c) ln E[e^{c f}], with the small-c series.
double certainty_equivalent(const TransitionLaw& law, const Payoff& payoff, double c) {
    const auto kinks = payoff_kinks(payoff);
    if (c < kSeriesThreshold) {
        const double mean = expectation(law, [&](double s) { return payoff(s); }, kinks);
        if (c == 0.0) return mean;
        const double var = expectation(
            law,
            [&](double s) {
                const double d = payoff(s) - mean;
                return d * d;
            },
            kinks);
        return mean + 0.5 * c * var;
    }
    check_exponential_integrability(law, payoff);
    return log_mgf(law, payoff, c) / c;
}

}  // namespace

double expectation(const TransitionLaw& law, const std::function<double(double)>& h,
                   std::span<const double> kinks) {
    if (law.scale == 0.0) return h(law.state(0.0));
    std::vector<double> scores;
    for (double k : kinks) {
        if (auto z = law.normal_score(k)) scores.push_back(*z);
    }
    return normal_expectation([&](double z) { return h(law.state(z)); }, scores);
}

double expected_payoff(const DiffusionModel& model, const Payoff& payoff, double t, double y,
                       double T) {
    const auto law = law_of(model, t, y, T);
    return checked(expectation(law, [&](double s) { return payoff(s); }, payoff_kinks(payoff)),
                   "E[f]");
}

void check_exponential_integrability(const TransitionLaw& law, const Payoff& payoff) {
    if (law.scale == 0.0) return;
    const Growth up = payoff.upper_growth();
    if (law.family == TransitionLaw::Family::Gaussian) {
        if (up == Growth::Superlinear || payoff.lower_growth() == Growth::Superlinear) {
            throw IntegrabilityError("exp(c f) is not integrable: payoff grows superlinearly "
                                     "against a Gaussian tail");
        }
        return;
    }
    if (up != Growth::Bounded) {
        throw IntegrabilityError("exp(c f) is not integrable: payoff is unbounded against a "
                                 "lognormal upper tail");
    }
}

double exp_indifference_price(const DiffusionModel& model, const Payoff& payoff,
                              const RiskAversion& risk, double t, double y, double T) {
    const auto law = law_of(model, t, y, T);
    if (const auto* flat = std::get_if<FlatRiskAversion>(&risk)) {
        if (!(flat->alpha >= 0.0) || !std::isfinite(flat->alpha)) {
            throw ConfigError("principle.alpha", "must be >= 0");
        }
        return checked(certainty_equivalent(law, payoff, flat->alpha), "indifference price");
    }
    const auto& b = std::get<BenchmarkRiskAversion>(risk);
    if (!(b.gamma >= 0.0) || !std::isfinite(b.gamma)) {
        throw ConfigError("principle.gamma", "must be >= 0");
    }
    if (!(b.X0 > 0.0)) throw ConfigError("principle.X0", "must be > 0");
    const double c = b.gamma / (b.X0 * std::exp(b.r * T));
    return checked(std::exp(-b.r * (T - t)) * certainty_equivalent(law, payoff, c),
                   "indifference price");
}

double power_price(const DiffusionModel& model, const Payoff& payoff, double gamma, double r,
                   double t, double y, double T) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("principle.gamma", "must be >= 0");
    }
    if (!payoff.positive()) {
        throw DomainError("power price needs a payoff declared positive");
    }
    const auto law = law_of(model, t, y, T);
    const double p = 1.0 + gamma;
    const double moment = expectation(
        law,
        [&](double s) {
            const double f = payoff(s);
            if (!(f > 0.0)) {
                std::ostringstream os;
                os << "payoff value " << f << " at state " << s << " is not positive";
                throw DomainError(os.str());
            }
            return std::pow(f, p);
        },
        payoff_kinks(payoff));
    checked(moment, "E[f^(1+gamma)]");
    return std::exp(-r * (T - t)) * std::pow(moment, 1.0 / p);
}

double stddev_price(const DiffusionModel& model, const Payoff& payoff, double beta, double r,
                    double t, double y, double T) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("principle.beta", "must be >= 0");
    double shift = 0.0;
    switch (payoff.monotonicity()) {
        case Monotonicity::Increasing: shift = beta; break;
        case Monotonicity::Decreasing: shift = -beta; break;
        case Monotonicity::NonMonotone:
            throw UnsupportedError(
                "no closed form for a non-monotone payoff; use the pde engine");
    }
    const DiffusionModel adjusted = shift == 0.0 ? model : model.with_drift_shift(shift);
    return std::exp(-r * (T - t)) * expected_payoff(adjusted, payoff, t, y, T);
}

double coc_price(const DiffusionModel& model, const Payoff& payoff, double delta, double q,
                 double r, double t, double y, double T) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw ConfigError("principle.delta", "must be >= 0");
    }
    if (!(q > 0.5 && q < 1.0)) throw ConfigError("principle.q", "must lie in (0.5, 1)");
    return stddev_price(model, payoff, delta * inverse_normal_cdf(q), r, t, y, T);
}

double mean_value_price(const DiffusionModel& model, const Payoff& payoff, const Distortion& v,
                        double r, double t, double y, double T) {
    const auto law = law_of(model, t, y, T);
    const double growth = std::exp(r * T);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const double m = expectation(
        law,
        [&](double s) {
            const double x = payoff(s) / growth;
            if (!v.in_domain(x)) {
                std::ostringstream os;
                os << "forward payoff " << x << " outside the domain of v = " << v.name();
                throw DomainError(os.str());
            }
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            return v(x);
        },
        payoff_kinks(payoff));
    checked(m, "E[v(f)]");
    const double x = lo == hi ? lo : v.inverse(m, lo, hi);
    return std::exp(r * t) * x;
}

double closed_form_price(const DiffusionModel& model, const Payoff& payoff,
                         const PrincipleSpec& principle, double t, double y, double T) {
    principle.validate();
    switch (principle.kind) {
        case PrincipleKind::Variance:
            return exp_indifference_price(model, payoff, FlatRiskAversion{principle.alpha}, t, y, T);
        case PrincipleKind::VarianceDiscounted:
            return exp_indifference_price(
                model, payoff, BenchmarkRiskAversion{principle.gamma, principle.X0, principle.r}, t,
                y, T);
        case PrincipleKind::CurrentPriceBenchmark:
            return power_price(model, payoff, principle.gamma, principle.r, t, y, T);
        case PrincipleKind::MeanValue:
            return mean_value_price(model, payoff, *principle.v, principle.r, t, y, T);
        case PrincipleKind::StdDev:
            return stddev_price(model, payoff, principle.beta, principle.r, t, y, T);
        case PrincipleKind::CostOfCapital:
            return coc_price(model, payoff, principle.delta, principle.q, principle.r, t, y, T);
    }
    throw ConfigError("principle.kind", "unknown principle");
}

}  // namespace tcval
