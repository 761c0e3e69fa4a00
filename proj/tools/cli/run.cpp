#include "run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tcval/closedform.hpp"
#include "tcval/errors.hpp"
#include "tcval/harness.hpp"
#include "tcval/lattice.hpp"
#include "tcval/pde.hpp"

namespace tcval::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double round_significant(double x, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
}

/// t,y,price rows for time indices [first, last].
std::string surface_csv(const PriceSurface& s, std::size_t first, std::size_t last) {
    std::string out = "t,y,price\r\n";
    const Grid& g = s.grid();
    for (std::size_t i = first; i <= last; ++i) {
        for (std::size_t j = 0; j < g.n_space(); ++j) {
            out += fmt17(g.time(i));
            out += ',';
            out += fmt17(g.node(j));
            out += ',';
            out += fmt17(s.at(i, j));
            out += "\r\n";
        }
    }
    return out;
}

std::string full_surface_csv(const PriceSurface& s) { return surface_csv(s, 0, s.grid().n_time()); }

std::string with_suffix(const std::string& prefix, const std::string& suffix) {
    return prefix + "_" + suffix;
}

ordered_json grid_json(const Grid& g) {
    ordered_json j;
    j["t0"] = g.t0();
    j["T"] = g.T();
    j["n_time"] = g.n_time();
    j["n_space"] = g.n_space();
    j["y_center"] = g.spec().y_center;
    j["n_stddevs"] = g.spec().n_stddevs;
    j["y_min"] = g.node(0);
    j["y_max"] = g.node(g.n_space() - 1);
    j["scale"] = g.scale() == SpaceScale::Log ? "log" : "linear";
    return j;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;  // path, content

    void add(std::string path, std::string content) {
        files.emplace_back(std::move(path), std::move(content));
    }

    /// Written only after every engine succeeded.
    void commit() const {
        for (const auto& [path, content] : files) write_atomic(path, content);
    }
};

PriceSurface closed_form_row(const RunConfig& cfg, const Grid& grid) {
    // Only the t0 row carries closed-form values; later rows stay zero and
    // are not written.
    PriceSurface s(grid);
    auto row = s.row(0);
    for (std::size_t j = 0; j < grid.n_space(); ++j) {
        row[j] = closed_form_price(*cfg.model, *cfg.payoff, *cfg.principle, grid.t0(),
                                   grid.node(j), grid.T());
    }
    return s;
}

void run_price(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err) {
    const Grid grid = build_grid(*cfg.model, cfg.grid);
    std::vector<EngineChoice> engines;
    if (cfg.engine == EngineChoice::All) {
        engines = {EngineChoice::Lattice, EngineChoice::PDE, EngineChoice::ClosedForm};
    } else {
        engines = {cfg.engine};
    }

    Outputs outputs;
    ordered_json summary;
    summary["command"] = "price";
    summary["engine"] = to_string(cfg.engine);
    summary["parameters"] = cfg.echo;
    summary["grid"] = grid_json(grid);
    ordered_json prices = ordered_json::object();
    ordered_json warnings = ordered_json::object();
    std::map<std::string, std::vector<double>> first_rows;

    for (EngineChoice e : engines) {
        const std::string name = to_string(e);
        Stopwatch clock;
        double headline = 0.0;
        std::string csv;
        std::vector<double> row0;
        if (e == EngineChoice::ClosedForm) {
            const PriceSurface s = closed_form_row(cfg, grid);
            headline = closed_form_price(*cfg.model, *cfg.payoff, *cfg.principle, grid.t0(),
                                         cfg.grid.y_center, grid.T());
            csv = surface_csv(s, 0, 0);
            row0.assign(s.row(0).begin(), s.row(0).end());
        } else {
            const PriceSurface s =
                e == EngineChoice::Lattice
                    ? backward_induct(*cfg.model, *cfg.payoff, *cfg.principle, grid, cfg.tree,
                                      threads)
                    : solve_semilinear(*cfg.model, *cfg.payoff, generator_for(*cfg.principle),
                                       grid, cfg.solver);
            headline = s.headline();
            csv = full_surface_csv(s);
            row0.assign(s.row(0).begin(), s.row(0).end());
            if (!s.warnings().empty()) warnings[name] = s.warnings();
            for (const auto& w : s.warnings()) err << "warning (" << name << "): " << w << "\n";
        }
        err << "runtime " << name << ": " << clock.seconds() << " s\n";
        prices[name] = headline;
        first_rows[name] = std::move(row0);
        const std::string path = with_suffix(cfg.output, name + "_surface.csv");
        outputs.add(path, std::move(csv));
    }

    summary["t0"] = grid.t0();
    summary["y_center"] = cfg.grid.y_center;
    if (engines.size() == 1) summary["price"] = prices[to_string(engines.front())];
    summary["prices"] = prices;
    if (!warnings.empty()) summary["warnings"] = warnings;
    if (engines.size() > 1) {
        const auto [first, last] = grid.central_window(0.5);
        ordered_json table = ordered_json::array();
        for (std::size_t a = 0; a < engines.size(); ++a) {
            for (std::size_t b = a + 1; b < engines.size(); ++b) {
                const auto& ra = first_rows[to_string(engines[a])];
                const auto& rb = first_rows[to_string(engines[b])];
                double sup = 0.0;
                for (std::size_t j = first; j < last; ++j) sup = std::max(sup, std::abs(ra[j] - rb[j]));
                ordered_json entry;
                entry["engines"] = to_string(engines[a]) + "-" + to_string(engines[b]);
                entry["sup_diff"] = sup;
                entry["headline_diff"] = std::abs(prices[to_string(engines[a])].get<double>() -
                                                  prices[to_string(engines[b])].get<double>());
                table.push_back(entry);
            }
        }
        summary["agreement_window"] = "central 50% of the space domain at t0";
        summary["agreement"] = table;
    }
    ordered_json files = ordered_json::array();
    for (const auto& [path, content] : outputs.files) files.push_back(fs::path(path).filename().string());
    summary["files"] = files;
    outputs.add(with_suffix(cfg.output, "summary.json"), summary.dump(2) + "\n");
    outputs.commit();
    out << summary.dump(2) << "\n";
}

void run_converge(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err) {
    const ConvergeSection& cs = *cfg.converge;
    ConvergenceCase c{.id = cs.id,
                      .model = *cfg.model,
                      .payoff = *cfg.payoff,
                      .principle = *cfg.principle,
                      .grid = cfg.grid,
                      .engine = cs.engine,
                      .tree = cfg.tree,
                      .solver = cfg.solver,
                      .refine_space = cs.refine_space,
                      .threads = threads};
    c.grid.n_time = cs.n_time.front();
    Stopwatch clock;
    const ConvergenceReport report = converge_to_limit(c, cs.n_time, cs.reference);
    err << "runtime converge: " << clock.seconds() << " s\n";

    Outputs outputs;
    outputs.add(with_suffix(cfg.output, "converge.csv"), report.to_csv());
    ordered_json summary;
    summary["command"] = "converge";
    summary["engine"] = to_string(cs.engine);
    summary["parameters"] = cfg.echo;
    summary["report"] = ordered_json::parse(report.to_json());
    outputs.add(with_suffix(cfg.output, "converge.json"), summary.dump(2) + "\n");
    outputs.commit();
    out << summary.dump(2) << "\n";
}

void run_davis(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err) {
    (void)threads;
    const Grid grid = build_grid(*cfg.model, cfg.grid);
    Stopwatch clock;
    const DavisSolution solution =
        solve_davis(*cfg.model, *cfg.payoff, cfg.davis->perturbation, *cfg.principle, grid,
                    cfg.solver);
    ConvergenceCase c{.id = "davis",
                      .model = *cfg.model,
                      .payoff = *cfg.payoff,
                      .principle = *cfg.principle,
                      .grid = cfg.grid,
                      .engine = EngineKind::PDE,
                      .solver = cfg.solver};
    const DavisReport report = davis_is_marginal_price(c, cfg.davis->perturbation, cfg.davis->eps);
    err << "runtime davis: " << clock.seconds() << " s\n";

    Outputs outputs;
    outputs.add(with_suffix(cfg.output, "base_surface.csv"), full_surface_csv(solution.base));
    outputs.add(with_suffix(cfg.output, "davis_surface.csv"), full_surface_csv(solution.davis));
    outputs.add(with_suffix(cfg.output, "davis_check.csv"), report.to_csv());
    ordered_json summary;
    summary["command"] = "davis";
    summary["parameters"] = cfg.echo;
    summary["grid"] = grid_json(grid);
    summary["base_price"] = solution.base.headline();
    summary["davis_price"] = solution.davis.headline();
    summary["check"] = ordered_json::parse(report.to_json());
    outputs.add(with_suffix(cfg.output, "davis.json"), summary.dump(2) + "\n");
    outputs.commit();
    out << summary.dump(2) << "\n";
}

void run_calibrate(const RunConfig& cfg, std::ostream& out) {
    const QuadrinomialCalibration c = calibrate_quadrinomial(*cfg.calibrate_q);
    ordered_json j;
    j["q"] = c.q;
    j["k"] = round_significant(c.k, 3);
    j["l"] = round_significant(c.l, 3);
    out << j.dump() << "\n";
}

unsigned parse_threads(const std::string& text, const char* field) {
    char* end = nullptr;
    errno = 0;
    const long long n = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || *end != '\0' || errno != 0 || n < 1 || n > 4096) {
        throw ConfigError(field, "must be an integer in [1, 4096]");
    }
    return static_cast<unsigned>(n);
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write '" + tmp.string() + "'");
        f << content;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

void execute(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
        case Command::Price: run_price(cfg, threads, out, err); break;
        case Command::Converge: run_converge(cfg, threads, out, err); break;
        case Command::Davis: run_davis(cfg, threads, out, err); break;
        case Command::Calibrate: run_calibrate(cfg, out); break;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-consistent valuation engine", "tcval"};
    std::string command_name;
    std::string config_path;
    std::string out_prefix;
    std::string threads_text;
    app.add_option("command", command_name, "price | converge | davis | calibrate")->required();
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_prefix, "Output path prefix (overrides the config)");
    app.add_option("--threads", threads_text, "Worker threads (fallback: TCVAL_THREADS)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const Command command = command_from_string(command_name);
        unsigned threads = std::max(1u, std::thread::hardware_concurrency());
        if (!threads_text.empty()) {
            threads = parse_threads(threads_text, "--threads");
        } else if (const char* env = std::getenv("TCVAL_THREADS"); env && *env) {
            threads = parse_threads(env, "TCVAL_THREADS");
        }
        RunConfig cfg = load_config(config_path, command);
        if (!out_prefix.empty()) cfg.output = out_prefix;
        execute(cfg, threads, out, err);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace tcval::cli
