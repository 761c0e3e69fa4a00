#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tcval/errors.hpp"

namespace tcval::cli {

namespace {

using nlohmann::json;

/// Object view that records which keys were read and rejects the rest.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "must be an object");
    }

    std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) throw ConfigError(field(key), "missing");
        return node_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key), "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
        return x;
    }

    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : (seen_.insert(key), fallback);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(field(key), "must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v.get<long long>());
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key), "must be a string");
        return v.get<std::string>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(field(key), "must be an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "must be a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Section child(const std::string& key) {
        return Section(raw(key), field(key));
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

/// Rethrows a core ConfigError with the section prefix if it lacks one.
template <class Fn>
auto prefixed(const std::string& prefix, Fn fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        const std::string& f = e.field();
        if (f.rfind(prefix + ".", 0) == 0 || f == prefix) throw;
        std::string what = e.what();
        const std::string head = f + ": ";
        if (what.rfind(head, 0) == 0) what = what.substr(head.size());
        throw ConfigError(prefix + "." + f, what);
    }
}

DiffusionModel parse_model(Section s) {
    const std::string kind_name = s.text("kind");
    const ModelKind kind = prefixed("model", [&] { return model_kind_from_string(kind_name); });
    if (kind == ModelKind::Custom) {
        throw ConfigError("model.kind", "Custom models need coefficient functions; use the library");
    }
    ParameterSet params;
    for (const char* key : {"drift", "diffusion", "kappa", "theta", "mu", "sigma"}) {
        if (s.has(key)) params[key] = s.number(key);
    }
    s.finish();
    return prefixed("model", [&] { return make_model(kind, params); });
}

Payoff parse_payoff(Section s) {
    const std::string kind_name = s.text("kind");
    const PayoffKind kind = prefixed("payoff", [&] { return payoff_kind_from_string(kind_name); });
    std::optional<Payoff> payoff;
    switch (kind) {
        case PayoffKind::Linear:
            payoff = Payoff::linear(s.number("slope"), s.number("intercept", 0.0));
            break;
        case PayoffKind::Constant: payoff = Payoff::constant(s.number("c")); break;
        case PayoffKind::Call: payoff = Payoff::call(s.number("strike")); break;
        case PayoffKind::Put: payoff = Payoff::put(s.number("strike")); break;
        case PayoffKind::Power: payoff = Payoff::power(s.number("exponent")); break;
        case PayoffKind::PiecewiseLinear: {
            auto knots = s.numbers("knots");
            auto values = s.numbers("values");
            const auto mono = prefixed(
                "payoff", [&] { return monotonicity_from_string(s.text("monotonicity")); });
            payoff = prefixed("payoff", [&] {
                return Payoff::piecewise_linear(std::move(knots), std::move(values), mono);
            });
            break;
        }
    }
    if (s.has("positive")) payoff = payoff->with_positive(s.flag("positive", false));
    s.finish();
    return *payoff;
}

GridSpec parse_grid(Section s) {
    GridSpec g;
    g.t0 = s.number("t0", g.t0);
    g.T = s.number("T", g.T);
    g.n_time = s.count("n_time", g.n_time);
    g.y_center = s.number("y_center", g.y_center);
    g.n_space = s.count("n_space", g.n_space);
    g.n_stddevs = s.number("n_stddevs", g.n_stddevs);
    s.finish();
    if (g.n_time < 1) throw ConfigError("grid.n_time", "must be >= 1");
    if (g.n_space < 3) throw ConfigError("grid.n_space", "must be >= 3");
    if (!(g.T > g.t0)) throw ConfigError("grid.T", "horizon must exceed t0");
    if (!(g.n_stddevs > 0.0)) throw ConfigError("grid.n_stddevs", "must be > 0");
    return g;
}

Distortion parse_distortion(Section s) {
    const std::string kind = s.text("kind");
    std::optional<Distortion> v;
    if (kind == "linear") {
        v = Distortion::linear();
    } else if (kind == "exponential") {
        const double a = s.number("a");
        v = prefixed(s.field("a"), [&] { return Distortion::exponential(a); });
    } else if (kind == "power") {
        const double gamma = s.number("gamma");
        v = prefixed(s.field("gamma"), [&] { return Distortion::power(gamma); });
    } else {
        throw ConfigError(s.field("kind"), "unknown distortion '" + kind + "'");
    }
    s.finish();
    return *v;
}

PrincipleSpec parse_principle(Section s) {
    const std::string kind_name = s.text("kind");
    const PrincipleKind kind =
        prefixed("principle", [&] { return principle_kind_from_string(kind_name); });
    PrincipleSpec p;
    switch (kind) {
        case PrincipleKind::Variance: p = PrincipleSpec::variance(s.number("alpha")); break;
        case PrincipleKind::VarianceDiscounted:
            p = PrincipleSpec::variance_discounted(s.number("gamma"), s.number("X0", 1.0),
                                                   s.number("r", 0.0));
            break;
        case PrincipleKind::CurrentPriceBenchmark:
            p = PrincipleSpec::current_price_benchmark(s.number("gamma"), s.number("r", 0.0));
            break;
        case PrincipleKind::MeanValue: {
            Distortion v = parse_distortion(s.child("v"));
            p = PrincipleSpec::mean_value(std::move(v), s.number("r", 0.0));
            break;
        }
        case PrincipleKind::StdDev:
            p = PrincipleSpec::stddev(s.number("beta"), s.number("r", 0.0));
            break;
        case PrincipleKind::CostOfCapital:
            p = PrincipleSpec::cost_of_capital(s.number("delta"), s.number("q", 0.995),
                                               s.number("r", 0.0));
            break;
    }
    s.finish();
    prefixed("principle", [&] { p.validate(); });
    return p;
}

SolverConfig parse_solver(Section s) {
    SolverConfig c;
    c.theta = s.number("theta", c.theta);
    c.max_cfl = s.number("max_cfl", c.max_cfl);
    c.rannacher_steps = s.count("rannacher_steps", c.rannacher_steps);
    s.finish();
    prefixed("solver", [&] { c.validate(); });
    return c;
}

ConvergeSection parse_converge(Section s) {
    ConvergeSection c;
    c.id = s.text("id", c.id);
    if (s.has("n_time")) {
        c.n_time.clear();
        const json& v = s.raw("n_time");
        if (!v.is_array() || v.empty()) {
            throw ConfigError("converge.n_time", "must be a non-empty array of integers");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer() || v[i].get<long long>() < 1) {
                throw ConfigError("converge.n_time[" + std::to_string(i) + "]",
                                  "must be a positive integer");
            }
            c.n_time.push_back(static_cast<std::size_t>(v[i].get<long long>()));
        }
        for (std::size_t i = 1; i < c.n_time.size(); ++i) {
            if (c.n_time[i] != 2 * c.n_time[i - 1]) {
                throw ConfigError("converge.n_time", "each entry must double the previous one");
            }
        }
    }
    if (s.has("reference")) {
        const std::string ref = s.text("reference");
        c.reference = prefixed("converge", [&] { return reference_kind_from_string(ref); });
    }
    if (s.has("engine")) {
        const std::string eng = s.text("engine");
        c.engine = prefixed("converge", [&] { return engine_kind_from_string(eng); });
    }
    c.refine_space = s.flag("refine_space", c.refine_space);
    s.finish();
    return c;
}

DavisSection parse_davis(Section s) {
    DavisSection d{parse_payoff(s.child("perturbation"))};
    if (s.has("eps")) {
        d.eps = s.numbers("eps");
        if (d.eps.empty()) throw ConfigError("davis.eps", "must not be empty");
        for (std::size_t i = 0; i < d.eps.size(); ++i) {
            if (!(d.eps[i] > 0.0) || (i > 0 && !(d.eps[i] < d.eps[i - 1]))) {
                throw ConfigError("davis.eps", "must be positive and strictly decreasing");
            }
        }
    }
    s.finish();
    return d;
}

EngineChoice engine_from_string(const std::string& name) {
    if (name == "lattice") return EngineChoice::Lattice;
    if (name == "pde") return EngineChoice::PDE;
    if (name == "closedform") return EngineChoice::ClosedForm;
    if (name == "all") return EngineChoice::All;
    throw ConfigError("engine", "unknown engine '" + name + "'");
}

TreeKind tree_from_string(const std::string& name) {
    if (name == "binomial") return TreeKind::Binomial;
    if (name == "quadrinomial") return TreeKind::Quadrinomial;
    throw ConfigError("tree", "unknown tree '" + name + "'");
}

void require(bool present, const char* field, Command command) {
    if (!present) throw ConfigError(field, "required by the " + to_string(command) + " command");
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Price: return "price";
        case Command::Converge: return "converge";
        case Command::Davis: return "davis";
        case Command::Calibrate: return "calibrate";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    if (name == "price") return Command::Price;
    if (name == "converge") return Command::Converge;
    if (name == "davis") return Command::Davis;
    if (name == "calibrate") return Command::Calibrate;
    throw ConfigError("command", "unknown command '" + name + "'");
}

std::string to_string(EngineChoice engine) {
    switch (engine) {
        case EngineChoice::Lattice: return "lattice";
        case EngineChoice::PDE: return "pde";
        case EngineChoice::ClosedForm: return "closedform";
        case EngineChoice::All: return "all";
    }
    return "unknown";
}

RunConfig parse_config(const nlohmann::json& doc, Command command) {
    Section root(doc, "");
    RunConfig cfg;
    cfg.command = command;
    if (root.has("command") && command_from_string(root.text("command")) != command) {
        throw ConfigError("command", "config is for '" + doc.at("command").get<std::string>() +
                                         "', not '" + to_string(command) + "'");
    }
    for (const char* key : {"model", "payoff", "grid", "principle", "engine", "tree", "solver"}) {
        if (doc.contains(key)) cfg.echo[key] = doc.at(key);
    }
    if (root.has("model")) cfg.model = parse_model(root.child("model"));
    if (root.has("payoff")) cfg.payoff = parse_payoff(root.child("payoff"));
    if (root.has("grid")) cfg.grid = parse_grid(root.child("grid"));
    if (root.has("principle")) cfg.principle = parse_principle(root.child("principle"));
    if (root.has("solver")) cfg.solver = parse_solver(root.child("solver"));
    if (root.has("engine")) cfg.engine = engine_from_string(root.text("engine"));
    const bool coc = cfg.principle && cfg.principle->kind == PrincipleKind::CostOfCapital;
    if (root.has("tree")) {
        cfg.tree = tree_from_string(root.text("tree"));
    } else {
        cfg.tree = coc ? TreeKind::Quadrinomial : TreeKind::Binomial;
    }
    cfg.output = root.text("output", cfg.output);
    if (cfg.output.empty()) throw ConfigError("output", "must not be empty");
    if (root.has("converge")) cfg.converge = parse_converge(root.child("converge"));
    if (root.has("davis")) cfg.davis = parse_davis(root.child("davis"));
    if (root.has("calibrate")) {
        Section c = root.child("calibrate");
        cfg.calibrate_q = c.number("q");
        c.finish();
    }
    root.finish();

    switch (command) {
        case Command::Calibrate: require(cfg.calibrate_q.has_value(), "calibrate.q", command); break;
        case Command::Davis: require(cfg.davis.has_value(), "davis", command); [[fallthrough]];
        case Command::Converge:
            if (command == Command::Converge) require(cfg.converge.has_value(), "converge", command);
            [[fallthrough]];
        case Command::Price:
            require(cfg.model.has_value(), "model", command);
            require(cfg.payoff.has_value(), "payoff", command);
            require(cfg.principle.has_value(), "principle", command);
            break;
    }
    if (command != Command::Calibrate) {
        if ((cfg.engine == EngineChoice::ClosedForm || cfg.engine == EngineChoice::All) &&
            !cfg.model->has_transition()) {
            throw ConfigError("engine", "closedform needs a model with an analytic transition law");
        }
        const bool lattice = cfg.engine == EngineChoice::Lattice ||
                             cfg.engine == EngineChoice::All ||
                             (cfg.converge && cfg.converge->engine == EngineKind::Lattice &&
                              command == Command::Converge);
        if (coc && lattice && cfg.tree != TreeKind::Quadrinomial) {
            throw ConfigError("tree", "CostOfCapital on the lattice requires the quadrinomial tree");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path, Command command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buffer.str(), nullptr, true, /*ignore_comments=*/false);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, command);
}

}  // namespace tcval::cli
