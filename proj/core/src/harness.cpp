#include "tcval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tcval/closedform.hpp"
#include "tcval/errors.hpp"
#include "tcval/normal.hpp"

namespace tcval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string json_number(double x) {
    if (!std::isfinite(x)) return "null";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

template <class T, class Fn>
std::string json_array(const std::vector<T>& v, Fn fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out + "]";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string csv_number(double x) {
    if (!std::isfinite(x)) return "";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void check_doubling(const std::vector<std::size_t>& n) {
    if (n.empty()) throw ConfigError("n_time_sequence", "must not be empty");
    if (n.front() < 1) throw ConfigError("n_time_sequence", "entries must be >= 1");
    for (std::size_t i = 1; i < n.size(); ++i) {
        if (n[i] != 2 * n[i - 1]) {
            throw ConfigError("n_time_sequence", "each entry must double the previous one");
        }
    }
}

GridSpec level_spec(const ConvergenceCase& c, std::size_t coarsest, std::size_t n_time) {
    GridSpec g = c.grid;
    g.n_time = n_time;
    if (c.refine_space) {
        const std::size_t factor = n_time / coarsest;
        g.n_space = (c.grid.n_space - 1) * std::max<std::size_t>(factor, 1) + 1;
    }
    return g;
}

PriceSurface run_engine(const ConvergenceCase& c, const Grid& grid) {
    if (c.engine == EngineKind::Lattice) {
        return backward_induct(c.model, c.payoff, c.principle, grid, c.tree, c.threads);
    }
    return solve_semilinear(c.model, c.payoff, generator_for(c.principle), grid, c.solver);
}

/// Fills status and fitted_order from errors, against a reference scale.
void classify(std::vector<double> const& dt, std::vector<double> const& errors, double scale,
              double& order, ReportStatus& status, std::vector<std::string>& notes) {
    order = kNaN;
    const double floor = kExactFloor * std::max(1.0, scale);
    if (std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= floor; })) {
        status = ReportStatus::Exact;
        notes.push_back("all errors at the roundoff floor; order undefined");
        return;
    }
    if (errors.size() < 4) {
        status = ReportStatus::Insufficient;
        notes.push_back("fewer than 4 refinement levels; order not fitted");
        return;
    }
    if (std::any_of(errors.begin(), errors.end(), [&](double e) { return e <= floor; })) {
        status = ReportStatus::Inconclusive;
        notes.push_back("some errors at the roundoff floor; order not fitted");
        return;
    }
    order = fitted_log_slope(dt, errors);
    status = ReportStatus::Ok;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (errors[i] > 2.0 * errors[i - 1]) {
            status = ReportStatus::Inconclusive;
            notes.push_back("error grows under refinement beyond factor-2 noise");
            break;
        }
    }
}

}  // namespace

std::string to_string(ReferenceKind kind) {
    return kind == ReferenceKind::ClosedForm ? "ClosedForm" : "PDEFine";
}

std::string to_string(ReportStatus status) {
    switch (status) {
        case ReportStatus::Ok: return "Ok";
        case ReportStatus::Inconclusive: return "Inconclusive";
        case ReportStatus::Exact: return "Exact";
        case ReportStatus::Insufficient: return "Insufficient";
    }
    return "Unknown";
}

std::string to_string(EngineKind kind) { return kind == EngineKind::Lattice ? "lattice" : "pde"; }

ReferenceKind reference_kind_from_string(const std::string& name) {
    if (name == "ClosedForm") return ReferenceKind::ClosedForm;
    if (name == "PDEFine") return ReferenceKind::PDEFine;
    throw ConfigError("reference", "unknown reference '" + name + "'");
}

EngineKind engine_kind_from_string(const std::string& name) {
    if (name == "lattice") return EngineKind::Lattice;
    if (name == "pde") return EngineKind::PDE;
    throw ConfigError("engine", "unknown engine '" + name + "'");
}

double fitted_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ContractError("fitted_log_slope needs two or more paired points");
    }
    double sx = 0.0, sy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw ContractError("fitted_log_slope needs positive values");
        }
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

std::vector<double> ConvergenceReport::error_ratios() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(errors[i] / errors[i + 1]);
    return out;
}

std::string ConvergenceReport::to_json() const {
    std::ostringstream os;
    os << "{\"case_id\":" << json_string(case_id)
       << ",\"reference\":" << json_string(to_string(reference))
       << ",\"n_time\":" << json_array(n_time, [](std::size_t n) { return std::to_string(n); })
       << ",\"dt_sequence\":" << json_array(dt_sequence, json_number)
       << ",\"errors\":" << json_array(errors, json_number)
       << ",\"headline_errors\":" << json_array(headline_errors, json_number)
       << ",\"headline_prices\":" << json_array(headline_prices, json_number)
       << ",\"reference_headline\":" << json_number(reference_headline)
       << ",\"fitted_order\":" << json_number(fitted_order)
       << ",\"status\":" << json_string(to_string(status))
       << ",\"notes\":" << json_array(notes, json_string) << "}";
    return os.str();
}

std::string ConvergenceReport::to_csv() const {
    std::ostringstream os;
    os << "case_id,dt,error,fitted_order,reference\r\n";
    for (std::size_t i = 0; i < errors.size(); ++i) {
        os << csv_field(case_id) << ',' << csv_number(dt_sequence[i]) << ','
           << csv_number(errors[i]) << ',' << csv_number(fitted_order) << ','
           << to_string(reference) << "\r\n";
    }
    return os.str();
}

ConvergenceReport converge_to_limit(const ConvergenceCase& c,
                                    const std::vector<std::size_t>& n_time_sequence,
                                    ReferenceKind reference) {
    check_doubling(n_time_sequence);
    c.principle.validate();

    ConvergenceReport report;
    report.case_id = c.id;
    report.reference = reference;
    report.n_time = n_time_sequence;

    std::optional<PriceSurface> fine;
    if (reference == ReferenceKind::PDEFine) {
        GridSpec g = level_spec(c, n_time_sequence.front(), n_time_sequence.back());
        g.n_time *= 4;
        g.n_space = 2 * (g.n_space - 1) + 1;
        const Grid grid = build_grid(c.model, g);
        fine.emplace(solve_semilinear(c.model, c.payoff, generator_for(c.principle), grid,
                                      c.solver));
        report.notes.push_back("reference: pde solve with dt/4 and dy/2 of the finest level");
    } else {
        report.notes.push_back("reference: closed form");
    }
    auto reference_at = [&](double y) {
        if (fine) return fine->interpolate(0, y);
        return closed_form_price(c.model, c.payoff, c.principle, c.grid.t0, y, c.grid.T);
    };

    report.reference_headline = reference_at(c.grid.y_center);
    double scale = std::abs(report.reference_headline);
    for (std::size_t n : n_time_sequence) {
        const Grid grid = build_grid(c.model, level_spec(c, n_time_sequence.front(), n));
        const PriceSurface surface = run_engine(c, grid);
        for (const auto& w : surface.warnings()) report.notes.push_back(w);
        const auto [first, last] = grid.central_window(0.5);
        double sup = 0.0;
        for (std::size_t j = first; j < last; ++j) {
            const double ref = reference_at(grid.node(j));
            scale = std::max(scale, std::abs(ref));
            sup = std::max(sup, std::abs(surface.at(0, j) - ref));
        }
        const double headline = surface.headline();
        report.dt_sequence.push_back(grid.dt());
        report.errors.push_back(sup);
        report.headline_prices.push_back(headline);
        report.headline_errors.push_back(headline - report.reference_headline);
    }
    classify(report.dt_sequence, report.errors, scale, report.fitted_order, report.status,
             report.notes);
    return report;
}

ConvergenceReport converge_lattice_to_limit(const ConvergenceCase& c,
                                            const std::vector<std::size_t>& n_time_sequence,
                                            ReferenceKind reference) {
    ConvergenceCase lattice = c;
    lattice.engine = EngineKind::Lattice;
    return converge_to_limit(lattice, n_time_sequence, reference);
}

ConvergenceReport coc_equals_stddev_limit(const ConvergenceCase& c, double delta, double q,
                                          const std::vector<std::size_t>& n_time_sequence) {
    if (c.payoff.monotonicity() == Monotonicity::NonMonotone) {
        throw UnsupportedError("cost-of-capital limit needs a monotone payoff");
    }
    ConvergenceCase coc = c;
    coc.engine = EngineKind::Lattice;
    coc.tree = TreeKind::Quadrinomial;
    coc.principle = PrincipleSpec::cost_of_capital(delta, q, c.principle.r);
    ConvergenceReport report = converge_to_limit(coc, n_time_sequence, ReferenceKind::ClosedForm);
    std::ostringstream os;
    os.precision(17);
    os << "reference: std-dev price with beta = " << delta * inverse_normal_cdf(q);
    report.notes.push_back(os.str());
    return report;
}

std::string DavisReport::to_json() const {
    std::ostringstream os;
    os << "{\"case_id\":" << json_string(case_id) << ",\"eps\":" << json_array(eps, json_number)
       << ",\"gaps\":" << json_array(gaps, json_number)
       << ",\"headline_quotients\":" << json_array(headline_quotients, json_number)
       << ",\"davis_headline\":" << json_number(davis_headline)
       << ",\"fitted_order\":" << json_number(fitted_order)
       << ",\"status\":" << json_string(to_string(status))
       << ",\"notes\":" << json_array(notes, json_string) << "}";
    return os.str();
}

std::string DavisReport::to_csv() const {
    std::ostringstream os;
    os << "case_id,eps,gap,fitted_order\r\n";
    for (std::size_t i = 0; i < eps.size(); ++i) {
        os << csv_field(case_id) << ',' << csv_number(eps[i]) << ',' << csv_number(gaps[i])
           << ',' << csv_number(fitted_order) << "\r\n";
    }
    return os.str();
}

DavisReport davis_is_marginal_price(const ConvergenceCase& c, const Payoff& perturbation,
                                    const std::vector<double>& eps_sequence) {
    if (eps_sequence.empty()) throw ConfigError("eps_sequence", "must not be empty");
    for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
        if (!(eps_sequence[i] > 0.0) || (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))) {
            throw ConfigError("eps_sequence", "must be positive and strictly decreasing");
        }
    }
    const Grid grid = build_grid(c.model, c.grid);
    const auto base_terminal = evaluate_payoff(c.payoff, grid.nodes());
    const auto claim_terminal = evaluate_payoff(perturbation, grid.nodes());
    const DavisSolution davis =
        solve_davis(c.model, base_terminal, claim_terminal, c.principle, grid, c.solver);
    const Generator generator = generator_for(c.principle);

    DavisReport report;
    report.case_id = c.id;
    report.eps = eps_sequence;
    report.davis_headline = davis.davis.headline();
    const auto [first, last] = grid.central_window(0.5);
    double scale = std::abs(report.davis_headline);
    for (std::size_t j = first; j < last; ++j) scale = std::max(scale, std::abs(davis.davis.at(0, j)));

    std::vector<double> bumped(base_terminal.size());
    for (double eps : eps_sequence) {
        for (std::size_t j = 0; j < bumped.size(); ++j) {
            bumped[j] = base_terminal[j] + eps * claim_terminal[j];
        }
        const PriceSurface perturbed = solve_semilinear(c.model, bumped, generator, grid, c.solver);
        double sup = 0.0;
        for (std::size_t j = first; j < last; ++j) {
            const double quotient = (perturbed.at(0, j) - davis.base.at(0, j)) / eps;
            sup = std::max(sup, std::abs(quotient - davis.davis.at(0, j)));
        }
        report.gaps.push_back(sup);
        report.headline_quotients.push_back(
            (perturbed.headline() - davis.base.headline()) / eps);
    }

    report.fitted_order = kNaN;
    const double floor = kExactFloor * std::max(1.0, scale);
    if (std::all_of(report.gaps.begin(), report.gaps.end(), [&](double g) { return g <= floor; })) {
        report.status = ReportStatus::Exact;
        report.notes.push_back("quotient equals the Davis price to roundoff for every eps");
    } else if (report.gaps.size() < 2) {
        report.status = ReportStatus::Insufficient;
    } else if (std::any_of(report.gaps.begin(), report.gaps.end(),
                           [&](double g) { return g <= floor; })) {
        report.status = ReportStatus::Inconclusive;
        report.notes.push_back("some gaps at the roundoff floor; order not fitted");
    } else {
        report.fitted_order = fitted_log_slope(report.eps, report.gaps);
        report.status = ReportStatus::Ok;
    }
    return report;
}

}  // namespace tcval
