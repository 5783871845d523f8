#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relcycle/cycles.hpp"
#include "relcycle/dynamics.hpp"
#include "relcycle/models.hpp"

namespace relcycle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Model { spring, three_d, swimmer };
enum class RunType { simulate, cycle, relative_cycle, sweep, energy_audit };

const char* to_string(Model m);
const char* to_string(RunType r);

struct ExperimentConfig {
    Model model = Model::spring;
    RunType run = RunType::simulate;
    models::SwimmerParams params;
    dynamics::IntegratorControl integrator = dynamics::FixedStep{1e-2};
    double t0 = 0.0;
    double duration = 0.0;
    std::optional<dynamics::State> initial_state;
    double eps = 0.0;
    std::vector<double> eps_grid;
    bool continuation = true;
    std::optional<dynamics::State> guess;
    cycles::ShootingOptions newton;
    std::string trajectory_file = "trajectory.csv";
    std::string certificate_file = "certificate.json";
    std::string phase_file = "phase.json";
    std::string report_file = "report.json";
};

/// Validates a flat key-path JSON object. Unknown keys, wrong types and keys
/// that do not apply to the chosen model or run type raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
    int jobs = 1;
    std::filesystem::path out_dir = ".";
};

/// Runs one experiment and writes its artifacts under options.out_dir.
/// Returns kExitOk or kExitNumerical; configuration problems throw.
int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

/// Loads, validates and runs a config file, mapping every failure onto the
/// documented exit codes. When `expected` is set the config's run type must
/// match it.
int run_config_file(const std::filesystem::path& path, const RunOptions& options,
                    std::optional<RunType> expected, std::ostream& log);

} // namespace relcycle::cli
