#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crawl/analysis.hpp"
#include "crawl/models.hpp"
#include "crawl/solver.hpp"

namespace crawl {

using json = nlohmann::json;

/// Parses a signal spec: a number (constant), an expression string, a
/// {"expr":..., "bindings":{...}} object or a {"table":{"t":[...],"v":[...]}}.
PeriodicSignal signal_from_json(const json& spec, double period, const std::string& where);

/// Parses a law spec: {"type":"dry"|"viscous"|"bingham"|"stribeck"|"custom", ...}.
FrictionLaw law_from_json(const json& spec, double period, const std::string& where);

DiscreteCrawler discrete_from_json(const json& spec);
ContinuousCrawler continuous_from_json(const json& spec);

/// Builtin scenarios, keyed by name, with the parameter overrides they accept
/// (alpha, T, load). Each returns the full model JSON.
json scenario_model(const std::string& name, const json& overrides);
std::vector<std::string> scenario_names();

struct RunConfig {
    json model_spec;                  // normalised model JSON
    std::optional<std::string> scenario;
    json overrides = json::object();
    SolverConfig solver;
    double v0 = 0.0;
    double periods = 1.0;
    double tol = 1e-6;
    int kmax = 10000;
    int grid_n = 512;
    std::filesystem::path out_dir = ".";

    json to_json() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const json& j);

/// Builds the reduced dynamics for a validated configuration.
ReducedDynamics build_dynamics(const RunConfig& cfg);

/// Shape velocities of the configured model (for gamma-stats).
std::vector<PeriodicSignal> shape_velocities(const RunConfig& cfg);

/// Exit codes: 0 success, 1 numerical/config failure, 2 dissipativity failure.
int run_command(const RunConfig& cfg, const std::string& command);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

} // namespace crawl
