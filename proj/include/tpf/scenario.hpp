// scenario.hpp: INI scenario configuration and the batch runner behind `tpflux run`

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpf/models.hpp"

namespace tpf::scenario {

enum class ModelKind { weak_coupling, jaynes_cummings, custom_pc, custom_map_file, closed_coherent };

std::string to_string(ModelKind m);

// Constant rates with an optional sin^2 modulation of the splitting.
struct CustomPCParams {
    double omega0 = 1.0;
    double delta = 0.0;
    double Omega = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double gamma_z = 0.0;
};

// Closed driven qubit with a coherent initial state given by its Bloch vector.
struct ClosedCoherentParams {
    double omega0 = 1.0;
    double delta = 1.0;
    double Omega = 0.15707963267948966;
    double field_x = 0.0;
    double bloch_x = 0.3;
    double bloch_y = 0.0;
    double bloch_z = -0.5;
};

struct Tolerances {
    double condition_threshold = kDefaultConditionThreshold;
    double condition_warning = 1e3;
    double cluster_tol = 1e-9;
};

struct OutputOptions {
    std::string directory = "tpflux_out";
    bool lambda_series = true;
    bool distributions = true;
    bool invertibility = true;
    bool coefficients = true;
    std::vector<double> distribution_times;  // empty: the final grid time
};

struct ScenarioConfig {
    ModelKind model = ModelKind::weak_coupling;
    models::WeakCouplingParams weak_coupling;
    models::JCParams jaynes_cummings;
    CustomPCParams custom_pc;
    std::string map_file;
    ClosedCoherentParams closed_coherent;

    double t_max = 10.0;
    int n_steps = 1000;
    std::vector<double> betas{1.0};

    OutputOptions output;
    Tolerances tolerances;

    std::string base_directory;           // relative map_file paths resolve against this
    std::vector<std::string> defaulted;   // "section.key" entries filled from defaults
};

// Throws ConfigError with the offending line (syntax) or field (values).
ScenarioConfig parse_config(std::istream& in, const std::string& base_directory = ".");
ScenarioConfig parse_config_file(const std::string& path);

// Invariants: n_steps >= 16, t_max > 0, betas positive, referenced map files exist.
void validate(const ScenarioConfig& cfg);

// Manifest INI: the full configuration echo followed by a [manifest] section with
// the tool version and the defaulted keys. parse_config accepts it back.
void write_manifest(std::ostream& os, const ScenarioConfig& cfg);

bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b);

extern const char* const kToolVersion;

struct RunResult {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    std::vector<std::string> numerical_failures;  // singular maps or truncation, with time labels
};

// Builds the model once per beta, evaluates cells in parallel and writes the
// outputs in beta order.
RunResult run(const ScenarioConfig& cfg);

} // namespace tpf::scenario
