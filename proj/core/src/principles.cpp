#include "tcval/principles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tcval/errors.hpp"

namespace tcval {

// --- DiscreteDistribution --------------------------------------------------

DiscreteDistribution::DiscreteDistribution(std::vector<Outcome> outcomes)
    : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw DomainError("DiscreteDistribution: no outcomes");
    double total = 0.0;
    for (const auto& o : outcomes_) {
        if (!(o.probability > 0.0) || !std::isfinite(o.probability)) {
            throw DomainError("DiscreteDistribution: probabilities must be > 0");
        }
        total += o.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "DiscreteDistribution: probabilities sum to " << total;
        throw DomainError(os.str());
    }
}

DiscreteDistribution DiscreteDistribution::point(double value) {
    return DiscreteDistribution({{value, 1.0}}, Unchecked{});
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (const auto& o : outcomes_) m += o.probability * o.value;
    return m;
}

double DiscreteDistribution::variance() const {
    const double m = mean();
    double v = 0.0;
    for (const auto& o : outcomes_) {
        const double d = o.value - m;
        v += o.probability * d * d;
    }
    return std::max(v, 0.0);
}

double DiscreteDistribution::stddev() const { return std::sqrt(variance()); }

double DiscreteDistribution::min_value() const {
    return std::min_element(outcomes_.begin(), outcomes_.end(),
                            [](const Outcome& a, const Outcome& b) { return a.value < b.value; })
        ->value;
}

double DiscreteDistribution::max_value() const {
    return std::max_element(outcomes_.begin(), outcomes_.end(),
                            [](const Outcome& a, const Outcome& b) { return a.value < b.value; })
        ->value;
}

// --- Distortion ------------------------------------------------------------

Distortion::Distortion(std::string name, Fn value, Fn first, Fn second, double domain_lo,
                       double domain_hi)
    : name_(std::move(name)),
      value_(std::move(value)),
      first_(std::move(first)),
      second_(std::move(second)),
      lo_(domain_lo),
      hi_(domain_hi) {}

Distortion Distortion::linear() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Distortion(
        "linear", [](double x) { return x; }, [](double) { return 1.0; },
        [](double) { return 0.0; }, -inf, inf);
}

Distortion Distortion::exponential(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw ConfigError("principle.v.alpha", "exponential distortion needs a > 0");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Distortion(
        "exponential", [a](double x) { return std::exp(a * x); },
        [a](double x) { return a * std::exp(a * x); },
        [a](double x) { return a * a * std::exp(a * x); }, -inf, inf);
}

Distortion Distortion::power(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("principle.v.gamma", "power distortion needs gamma >= 0");
    }
    const double p = 1.0 + gamma;
    return Distortion(
        "power", [p](double x) { return std::pow(x, p); },
        [p](double x) { return p * std::pow(x, p - 1.0); },
        [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); }, 0.0,
        std::numeric_limits<double>::infinity());
}

double Distortion::inverse(double target, double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    const double vlo = value_(lo);
    const double vhi = value_(hi);
    const double slack = 1e-13 * std::max(std::abs(vlo), std::abs(vhi)) +
                         std::numeric_limits<double>::min();
    if (!std::isfinite(target) || target < vlo - slack || target > vhi + slack) {
        std::ostringstream os;
        os.precision(17);
        os << "distorted expectation " << target << " outside the range of v on [" << lo << ", "
           << hi << "]";
        throw DomainError(os.str());
    }
    if (target <= vlo) return lo;
    if (target >= vhi) return hi;

    double a = lo, b = hi;
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = value_(x) - target;
        if (f == 0.0) return x;
        if (f < 0.0) a = x; else b = x;
        const double tol = 1e-15 * std::max({std::abs(x), std::abs(lo), std::abs(hi)});
        const double d = first_(x);
        double next = (d > 0.0 && std::isfinite(d)) ? x - f / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const double step = std::abs(next - x);
        x = next;
        if (step <= tol || (b - a) <= tol) return x;
    }
    return x;
}

void Distortion::check_shape() const {
    double a, b;
    if (std::isfinite(lo_) && std::isfinite(hi_)) {
        a = lo_; b = hi_;
    } else if (std::isfinite(lo_)) {
        a = lo_; b = lo_ + 10.0;
    } else if (std::isfinite(hi_)) {
        a = hi_ - 10.0; b = hi_;
    } else {
        a = -5.0; b = 5.0;
    }
    constexpr int n = 101;
    for (int i = 1; i < n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / n;
        const double d1 = first_(x);
        const double d2 = second_(x);
        if (!(d1 > 0.0)) {
            throw ConfigError("principle.v", name_ + " distortion is not strictly increasing");
        }
        if (d2 < -1e-12 * std::abs(d1)) {
            throw ConfigError("principle.v", name_ + " distortion is not convex");
        }
    }
}

// --- PrincipleSpec ---------------------------------------------------------

std::string to_string(PrincipleKind kind) {
    switch (kind) {
        case PrincipleKind::Variance: return "Variance";
        case PrincipleKind::VarianceDiscounted: return "VarianceDiscounted";
        case PrincipleKind::CurrentPriceBenchmark: return "CurrentPriceBenchmark";
        case PrincipleKind::MeanValue: return "MeanValue";
        case PrincipleKind::StdDev: return "StdDev";
        case PrincipleKind::CostOfCapital: return "CostOfCapital";
    }
    return "?";
}

PrincipleKind principle_kind_from_string(const std::string& name) {
    if (name == "Variance") return PrincipleKind::Variance;
    if (name == "VarianceDiscounted") return PrincipleKind::VarianceDiscounted;
    if (name == "CurrentPriceBenchmark") return PrincipleKind::CurrentPriceBenchmark;
    if (name == "MeanValue") return PrincipleKind::MeanValue;
    if (name == "StdDev") return PrincipleKind::StdDev;
    if (name == "CostOfCapital") return PrincipleKind::CostOfCapital;
    throw ConfigError("principle.kind", "unknown principle '" + name + "'");
}

PrincipleSpec PrincipleSpec::variance(double alpha) {
    PrincipleSpec p;
    p.kind = PrincipleKind::Variance;
    p.alpha = alpha;
    return p;
}

PrincipleSpec PrincipleSpec::variance_discounted(double gamma, double X0, double r) {
    PrincipleSpec p;
    p.kind = PrincipleKind::VarianceDiscounted;
    p.gamma = gamma;
    p.X0 = X0;
    p.r = r;
    return p;
}

PrincipleSpec PrincipleSpec::current_price_benchmark(double gamma, double r) {
    PrincipleSpec p;
    p.kind = PrincipleKind::CurrentPriceBenchmark;
    p.gamma = gamma;
    p.r = r;
    return p;
}

PrincipleSpec PrincipleSpec::mean_value(Distortion v, double r) {
    PrincipleSpec p;
    p.kind = PrincipleKind::MeanValue;
    p.v = std::move(v);
    p.r = r;
    return p;
}

PrincipleSpec PrincipleSpec::stddev(double beta, double r) {
    PrincipleSpec p;
    p.kind = PrincipleKind::StdDev;
    p.beta = beta;
    p.r = r;
    return p;
}

PrincipleSpec PrincipleSpec::cost_of_capital(double delta, double q, double r) {
    PrincipleSpec p;
    p.kind = PrincipleKind::CostOfCapital;
    p.delta = delta;
    p.q = q;
    p.r = r;
    return p;
}

void PrincipleSpec::validate() const {
    auto nonneg = [](double x, const char* field) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw ConfigError(std::string("principle.") + field, "must be finite and >= 0");
        }
    };
    nonneg(alpha, "alpha");
    nonneg(gamma, "gamma");
    nonneg(beta, "beta");
    nonneg(delta, "delta");
    if (!(X0 > 0.0) || !std::isfinite(X0)) throw ConfigError("principle.X0", "must be > 0");
    if (!std::isfinite(r)) throw ConfigError("principle.r", "must be finite");
    if (!(q > 0.5 && q < 1.0)) throw ConfigError("principle.q", "must lie in (0.5, 1)");
    if (kind == PrincipleKind::MeanValue) {
        if (!v) throw ConfigError("principle.v", "mean-value principle needs a distortion");
        v->check_shape();
    }
}

// --- Step operators --------------------------------------------------------

double variance_step(const DiscreteDistribution& dist, double alpha) {
    return dist.mean() + 0.5 * alpha * dist.variance();
}

double variance_discounted_step(const DiscreteDistribution& dist, double gamma, double X0, double r,
                                double t, double dt) {
    const double aversion = gamma / (X0 * std::exp(r * (t + dt)));
    return std::exp(-r * dt) * (dist.mean() + 0.5 * aversion * dist.variance());
}

double current_price_benchmark_step(const DiscreteDistribution& dist, double gamma, double r,
                                    double dt) {
    const double m = dist.mean();
    if (!(m > 0.0)) {
        std::ostringstream os;
        os << "current-price benchmark needs a strictly positive expected price, got " << m;
        throw DomainError(os.str());
    }
    return std::exp(-r * dt) * (m + 0.5 * gamma * dist.variance() / m);
}

double mean_value_step(const DiscreteDistribution& dist, const Distortion& v, double r, double t,
                       double dt) {
    const double growth = std::exp(r * (t + dt));
    double target = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& o : dist.outcomes()) {
        const double x = o.value / growth;
        if (!v.in_domain(x)) {
            std::ostringstream os;
            os << "forward value " << x << " outside the domain of the " << v.name()
               << " distortion";
            throw DomainError(os.str());
        }
        target += o.probability * v(x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return std::exp(r * t) * v.inverse(target, lo, hi);
}

double stddev_step(const DiscreteDistribution& dist, double beta, double r, double dt) {
    return std::exp(-r * dt) * (dist.mean() + beta * std::sqrt(dt) * dist.stddev());
}

double var_quantile(const DiscreteDistribution& dist, double q) {
    if (!(q > 0.5 && q < 1.0)) throw DomainError("var_quantile: q must lie in (0.5, 1)");
    const double m = dist.mean();
    std::vector<Outcome> centered = dist.outcomes();
    for (auto& o : centered) o.value -= m;
    std::sort(centered.begin(), centered.end(),
              [](const Outcome& a, const Outcome& b) { return a.value < b.value; });

    constexpr double slack = 1e-12;
    double cumulative = 0.0;
    std::size_t i = 0;
    while (i < centered.size()) {
        const double x = centered[i].value;
        while (i < centered.size() && centered[i].value == x) {
            cumulative += centered[i].probability;
            ++i;
        }
        if (cumulative > q + slack) return x;
    }
    return centered.back().value;
}

double coc_step(const DiscreteDistribution& dist, double delta, double q, double r, double dt) {
    return std::exp(-r * dt) * (dist.mean() + delta * std::sqrt(dt) * var_quantile(dist, q));
}

double apply_step(const PrincipleSpec& spec, const DiscreteDistribution& dist, double t,
                  double dt) {
    switch (spec.kind) {
        case PrincipleKind::Variance: return variance_step(dist, spec.alpha);
        case PrincipleKind::VarianceDiscounted:
            return variance_discounted_step(dist, spec.gamma, spec.X0, spec.r, t, dt);
        case PrincipleKind::CurrentPriceBenchmark:
            return current_price_benchmark_step(dist, spec.gamma, spec.r, dt);
        case PrincipleKind::MeanValue: return mean_value_step(dist, *spec.v, spec.r, t, dt);
        case PrincipleKind::StdDev: return stddev_step(dist, spec.beta, spec.r, dt);
        case PrincipleKind::CostOfCapital: return coc_step(dist, spec.delta, spec.q, spec.r, dt);
    }
    return 0.0;
}

}  // namespace tcval
