#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcval/harness.hpp"
#include "tcval/lattice.hpp"
#include "tcval/model.hpp"
#include "tcval/pde.hpp"
#include "tcval/principles.hpp"
#include "tcval/surface.hpp"

namespace tcval::cli {

enum class Command { Price, Converge, Davis, Calibrate };
enum class EngineChoice { Lattice, PDE, ClosedForm, All };

std::string to_string(Command command);
Command command_from_string(const std::string& name);
std::string to_string(EngineChoice engine);

struct ConvergeSection {
    std::string id = "case";
    std::vector<std::size_t> n_time{64, 128, 256, 512};
    ReferenceKind reference = ReferenceKind::ClosedForm;
    EngineKind engine = EngineKind::Lattice;
    bool refine_space = false;
};

struct DavisSection {
    Payoff perturbation;
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
};

/// Parsed run configuration. Optional sections are only required by the
/// commands that use them.
struct RunConfig {
    Command command = Command::Price;
    std::optional<DiffusionModel> model;
    std::optional<Payoff> payoff;
    GridSpec grid;
    std::optional<PrincipleSpec> principle;
    EngineChoice engine = EngineChoice::Lattice;
    TreeKind tree = TreeKind::Binomial;
    SolverConfig solver;
    std::string output = "tcval";
    std::optional<ConvergeSection> converge;
    std::optional<DavisSection> davis;
    std::optional<double> calibrate_q;
    /// Input sections echoed into summaries.
    nlohmann::json echo;
};

/// Validates a JSON document against the schema. Unknown fields, wrong
/// types and invalid values raise ConfigError naming the field path.
RunConfig parse_config(const nlohmann::json& doc, Command command);

/// Reads and parses a config file (strict JSON, no comments).
RunConfig load_config(const std::string& path, Command command);

}  // namespace tcval::cli
