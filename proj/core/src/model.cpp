#include "tcval/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcval/errors.hpp"

namespace tcval {

namespace {

double require_finite(const ParameterSet& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) {
        throw ConfigError("model." + name, "missing parameter");
    }
    if (!std::isfinite(it->second)) {
        throw ConfigError("model." + name, "must be finite");
    }
    return it->second;
}

void reject_unknown(const ParameterSet& params, std::initializer_list<const char*> known) {
    for (const auto& [name, value] : params) {
        bool found = std::any_of(known.begin(), known.end(),
                                 [&](const char* k) { return name == k; });
        if (!found) {
            throw ConfigError("model." + name, "unknown parameter for this model kind");
        }
    }
}

bool is_integer(double x) { return std::nearbyint(x) == x; }

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ABM: return "ABM";
        case ModelKind::OU: return "OU";
        case ModelKind::GBM: return "GBM";
        case ModelKind::Custom: return "Custom";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "ABM") return ModelKind::ABM;
    if (name == "OU") return ModelKind::OU;
    if (name == "GBM") return ModelKind::GBM;
    if (name == "Custom") return ModelKind::Custom;
    throw ConfigError("model.kind", "unknown model kind '" + name + "'");
}

// --- TransitionLaw ---------------------------------------------------------

double TransitionLaw::mean() const {
    if (family == Family::Gaussian) return location;
    return std::exp(location + 0.5 * scale * scale);
}

double TransitionLaw::variance() const {
    if (family == Family::Gaussian) return scale * scale;
    const double s2 = scale * scale;
    return std::expm1(s2) * std::exp(2.0 * location + s2);
}

double TransitionLaw::state(double z) const {
    const double x = location + scale * z;
    return family == Family::Gaussian ? x : std::exp(x);
}

std::optional<double> TransitionLaw::normal_score(double y) const {
    if (scale <= 0.0) return std::nullopt;
    if (family == Family::Gaussian) return (y - location) / scale;
    if (y <= 0.0) return std::nullopt;
    return (std::log(y) - location) / scale;
}

// --- DiffusionModel --------------------------------------------------------

DiffusionModel DiffusionModel::abm(double drift, double diffusion) {
    return make_model(ModelKind::ABM, {{"drift", drift}, {"diffusion", diffusion}});
}

DiffusionModel DiffusionModel::ou(double kappa, double theta, double diffusion) {
    return make_model(ModelKind::OU,
                      {{"kappa", kappa}, {"theta", theta}, {"diffusion", diffusion}});
}

DiffusionModel DiffusionModel::gbm(double mu, double sigma) {
    return make_model(ModelKind::GBM, {{"mu", mu}, {"sigma", sigma}});
}

DiffusionModel DiffusionModel::custom(Coefficient drift, Coefficient diffusion,
                                      double lipschitz_bound) {
    if (!drift || !diffusion) {
        throw ConfigError("model.coefficients", "custom model needs drift and diffusion functions");
    }
    if (!(lipschitz_bound >= 0.0) || !std::isfinite(lipschitz_bound)) {
        throw ConfigError("model.lipschitz_bound", "must be a finite non-negative bound");
    }
    DiffusionModel m;
    m.kind_ = ModelKind::Custom;
    m.drift_ = std::move(drift);
    m.diffusion_ = std::move(diffusion);
    m.lipschitz_ = lipschitz_bound;
    return m;
}

DiffusionModel make_model(ModelKind kind, const ParameterSet& params) {
    DiffusionModel m;
    m.kind_ = kind;
    m.params_ = params;
    switch (kind) {
        case ModelKind::ABM: {
            reject_unknown(params, {"drift", "diffusion"});
            const double a = require_finite(params, "drift");
            const double b = require_finite(params, "diffusion");
            if (b < 0.0) throw ConfigError("model.diffusion", "must be >= 0");
            m.drift_ = [a](double, double) { return a; };
            m.diffusion_ = [b](double, double) { return b; };
            break;
        }
        case ModelKind::OU: {
            reject_unknown(params, {"kappa", "theta", "diffusion"});
            const double kappa = require_finite(params, "kappa");
            const double theta = require_finite(params, "theta");
            const double b = require_finite(params, "diffusion");
            if (kappa <= 0.0) throw ConfigError("model.kappa", "must be > 0");
            if (b < 0.0) throw ConfigError("model.diffusion", "must be >= 0");
            m.drift_ = [kappa, theta](double, double y) { return kappa * (theta - y); };
            m.diffusion_ = [b](double, double) { return b; };
            break;
        }
        case ModelKind::GBM: {
            reject_unknown(params, {"mu", "sigma"});
            const double mu = require_finite(params, "mu");
            const double sigma = require_finite(params, "sigma");
            if (sigma <= 0.0) throw ConfigError("model.sigma", "GBM volatility must be > 0");
            m.drift_ = [mu](double, double y) { return mu * y; };
            m.diffusion_ = [sigma](double, double y) { return sigma * y; };
            break;
        }
        case ModelKind::Custom:
            throw ConfigError("model.kind",
                              "Custom models are built with DiffusionModel::custom");
    }
    return m;
}

std::optional<TransitionLaw> DiffusionModel::transition(double t, double y, double T) const {
    if (kind_ == ModelKind::Custom) return std::nullopt;
    const double tau = T - t;
    if (tau < 0.0) throw DomainError("transition: horizon before current time");
    TransitionLaw law;
    switch (kind_) {
        case ModelKind::ABM: {
            const double a = params_.at("drift");
            const double b = params_.at("diffusion");
            law = {TransitionLaw::Family::Gaussian, y + a * tau, b * std::sqrt(tau)};
            break;
        }
        case ModelKind::OU: {
            const double kappa = params_.at("kappa");
            const double theta = params_.at("theta");
            const double b = params_.at("diffusion");
            const double var = -b * b * std::expm1(-2.0 * kappa * tau) / (2.0 * kappa);
            law = {TransitionLaw::Family::Gaussian, theta + (y - theta) * std::exp(-kappa * tau),
                   std::sqrt(var)};
            break;
        }
        case ModelKind::GBM: {
            if (y <= 0.0) throw DomainError("transition: GBM state must be positive");
            const double mu = params_.at("mu");
            const double sigma = params_.at("sigma");
            law = {TransitionLaw::Family::Lognormal,
                   std::log(y) + (mu - 0.5 * sigma * sigma) * tau, sigma * std::sqrt(tau)};
            break;
        }
        case ModelKind::Custom: break;
    }
    return law;
}

DiffusionModel DiffusionModel::with_drift_shift(double lambda) const {
    switch (kind_) {
        case ModelKind::ABM:
            return abm(params_.at("drift") + lambda * params_.at("diffusion"),
                       params_.at("diffusion"));
        case ModelKind::OU: {
            const double kappa = params_.at("kappa");
            const double b = params_.at("diffusion");
            return ou(kappa, params_.at("theta") + lambda * b / kappa, b);
        }
        case ModelKind::GBM:
            return gbm(params_.at("mu") + lambda * params_.at("sigma"), params_.at("sigma"));
        case ModelKind::Custom: {
            auto a = drift_;
            auto b = diffusion_;
            return custom([a, b, lambda](double t, double y) { return a(t, y) + lambda * b(t, y); },
                          b, *lipschitz_ + std::abs(lambda) * *lipschitz_);
        }
    }
    return *this;
}

double DiffusionModel::terminal_scale(double t0, double y, double T) const {
    const double tau = T - t0;
    switch (kind_) {
        case ModelKind::ABM:
        case ModelKind::OU: return transition(t0, y, T)->scale;
        case ModelKind::GBM: return params_.at("sigma") * std::sqrt(tau);
        case ModelKind::Custom: return std::abs(diffusion_(t0, y)) * std::sqrt(tau);
    }
    return 0.0;
}

// --- Payoff ----------------------------------------------------------------

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::Linear: return "Linear";
        case PayoffKind::Constant: return "Constant";
        case PayoffKind::Call: return "Call";
        case PayoffKind::Put: return "Put";
        case PayoffKind::Power: return "Power";
        case PayoffKind::PiecewiseLinear: return "PiecewiseLinear";
    }
    return "?";
}

std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "Increasing";
        case Monotonicity::Decreasing: return "Decreasing";
        case Monotonicity::NonMonotone: return "NonMonotone";
    }
    return "?";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
    if (name == "Linear") return PayoffKind::Linear;
    if (name == "Constant") return PayoffKind::Constant;
    if (name == "Call") return PayoffKind::Call;
    if (name == "Put") return PayoffKind::Put;
    if (name == "Power") return PayoffKind::Power;
    if (name == "PiecewiseLinear") return PayoffKind::PiecewiseLinear;
    throw ConfigError("payoff.kind", "unknown payoff kind '" + name + "'");
}

Monotonicity monotonicity_from_string(const std::string& name) {
    if (name == "Increasing") return Monotonicity::Increasing;
    if (name == "Decreasing") return Monotonicity::Decreasing;
    if (name == "NonMonotone") return Monotonicity::NonMonotone;
    throw ConfigError("payoff.monotonicity", "unknown monotonicity '" + name + "'");
}

Payoff::Payoff(PayoffKind kind, std::vector<double> params, Monotonicity monotonicity,
               bool positive)
    : kind_(kind), params_(std::move(params)), monotonicity_(monotonicity), positive_(positive) {
    auto expect = [&](std::size_t n) {
        if (params_.size() != n) {
            throw ConfigError("payoff.params", to_string(kind_) + " expects " +
                                                   std::to_string(n) + " parameter(s)");
        }
    };
    switch (kind_) {
        case PayoffKind::Linear: expect(2); break;
        case PayoffKind::Constant:
        case PayoffKind::Call:
        case PayoffKind::Put:
        case PayoffKind::Power: expect(1); break;
        case PayoffKind::PiecewiseLinear:
            if (params_.size() < 4 || params_.size() % 2 != 0) {
                throw ConfigError("payoff.params",
                                  "PiecewiseLinear expects pairs x0, v0, x1, v1, ... (at least two)");
            }
            for (std::size_t i = 2; i < params_.size(); i += 2) {
                if (!(params_[i] > params_[i - 2])) {
                    throw ConfigError("payoff.params", "PiecewiseLinear knots must increase");
                }
            }
            break;
    }
    for (double p : params_) {
        if (!std::isfinite(p)) throw ConfigError("payoff.params", "must be finite");
    }
}

Payoff Payoff::linear(double slope, double intercept) {
    return Payoff(PayoffKind::Linear, {slope, intercept},
                  slope >= 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing);
}

Payoff Payoff::constant(double c) {
    return Payoff(PayoffKind::Constant, {c}, Monotonicity::Increasing, c > 0.0);
}

Payoff Payoff::call(double strike) {
    return Payoff(PayoffKind::Call, {strike}, Monotonicity::Increasing);
}

Payoff Payoff::put(double strike) {
    return Payoff(PayoffKind::Put, {strike}, Monotonicity::Decreasing);
}

Payoff Payoff::power(double exponent) {
    return Payoff(PayoffKind::Power, {exponent},
                  exponent >= 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing, true);
}

Payoff Payoff::piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                Monotonicity monotonicity) {
    if (knots.size() != values.size()) {
        throw ConfigError("payoff.params", "knots and values differ in length");
    }
    std::vector<double> params;
    params.reserve(2 * knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        params.push_back(knots[i]);
        params.push_back(values[i]);
    }
    return Payoff(PayoffKind::PiecewiseLinear, std::move(params), monotonicity);
}

Payoff Payoff::with_positive(bool flag) const {
    Payoff p = *this;
    p.positive_ = flag;
    return p;
}

double Payoff::operator()(double y) const {
    switch (kind_) {
        case PayoffKind::Linear: return params_[0] * y + params_[1];
        case PayoffKind::Constant: return params_[0];
        case PayoffKind::Call: return std::max(y - params_[0], 0.0);
        case PayoffKind::Put: return std::max(params_[0] - y, 0.0);
        case PayoffKind::Power: return std::pow(y, params_[0]);
        case PayoffKind::PiecewiseLinear: {
            const std::size_t n = params_.size() / 2;
            if (y <= params_[0]) return params_[1];
            if (y >= params_[2 * (n - 1)]) return params_[2 * (n - 1) + 1];
            std::size_t i = 1;
            while (params_[2 * i] < y) ++i;
            const double x0 = params_[2 * (i - 1)], v0 = params_[2 * (i - 1) + 1];
            const double x1 = params_[2 * i], v1 = params_[2 * i + 1];
            return v0 + (v1 - v0) * (y - x0) / (x1 - x0);
        }
    }
    return 0.0;
}

std::vector<double> Payoff::kinks() const {
    switch (kind_) {
        case PayoffKind::Call:
        case PayoffKind::Put: return {params_[0]};
        case PayoffKind::PiecewiseLinear: {
            std::vector<double> k;
            for (std::size_t i = 0; i < params_.size(); i += 2) k.push_back(params_[i]);
            return k;
        }
        default: return {};
    }
}

Growth Payoff::upper_growth() const {
    switch (kind_) {
        case PayoffKind::Linear: return params_[0] > 0.0 ? Growth::Linear : Growth::Bounded;
        case PayoffKind::Call: return Growth::Linear;
        case PayoffKind::Power:
            if (params_[0] > 1.0) return Growth::Superlinear;
            return params_[0] > 0.0 ? Growth::Linear : Growth::Bounded;
        default: return Growth::Bounded;
    }
}

Growth Payoff::lower_growth() const {
    switch (kind_) {
        case PayoffKind::Linear: return params_[0] < 0.0 ? Growth::Linear : Growth::Bounded;
        case PayoffKind::Put: return Growth::Linear;
        case PayoffKind::Power: {
            const double p = params_[0];
            // Only even integer powers grow upward on the negative half-line.
            if (is_integer(p) && p >= 2.0 && std::fmod(p, 2.0) == 0.0) return Growth::Superlinear;
            return Growth::Bounded;
        }
        default: return Growth::Bounded;
    }
}

bool satisfies(Monotonicity m, std::span<const double> values) {
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (m == Monotonicity::Increasing && values[j] < values[j - 1]) return false;
        if (m == Monotonicity::Decreasing && values[j] > values[j - 1]) return false;
    }
    return true;
}

std::vector<double> evaluate_payoff(const Payoff& payoff, std::span<const double> y_nodes) {
    std::vector<double> out(y_nodes.size());
    for (std::size_t j = 0; j < y_nodes.size(); ++j) {
        const double y = y_nodes[j];
        if (!std::isfinite(y)) throw ContractError("evaluate_payoff: non-finite node");
        const double v = payoff(y);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "payoff " << to_string(payoff.kind()) << " is not finite at y=" << y;
            throw ContractError(os.str());
        }
        if (payoff.positive() && !(v > 0.0)) {
            std::ostringstream os;
            os << "payoff declared positive but f(" << y << ") = " << v;
            throw ContractError(os.str());
        }
        out[j] = v;
    }
    if (!satisfies(payoff.monotonicity(), out)) {
        throw ContractError("payoff violates declared monotonicity " +
                            to_string(payoff.monotonicity()));
    }
    return out;
}

}  // namespace tcval
