// tpflux: run scenarios, validate invariants, inspect map files

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tpf/dynamics.hpp"
#include "tpf/errors.hpp"
#include "tpf/io.hpp"
#include "tpf/scenario.hpp"
#include "tpf/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

int cmd_run(const std::string& config_path)
{
    tpf::scenario::ScenarioConfig cfg;
    try {
        cfg = tpf::scenario::parse_config_file(config_path);
        tpf::scenario::validate(cfg);
    } catch (const tpf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    try {
        const auto res = tpf::scenario::run(cfg);
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : res.files) std::cout << f << "\n";
        if (!res.numerical_failures.empty()) {
            for (const auto& f : res.numerical_failures) std::cerr << "numerical failure: " << f << "\n";
            return kNumericalFailure;
        }
    } catch (const tpf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const tpf::SingularMap& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const tpf::TruncationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const tpf::NoMatchingBeta& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kOk;
}

int cmd_validate(bool full)
{
    const auto results = tpf::validation::run_suite(full ? tpf::validation::Level::full : tpf::validation::Level::fast);
    int failed = 0;
    for (const auto& r : results) {
        nlohmann::json j{{"check", r.name},         {"passed", r.passed},   {"measured", r.measured},
                         {"tolerance", r.tolerance}, {"seconds", r.seconds}, {"detail", r.detail}};
        std::cout << j.dump() << "\n";
        if (!r.passed) ++failed;
    }
    nlohmann::json summary{{"suite", full ? "full" : "fast"},
                           {"checks", results.size()},
                           {"failed", failed},
                           {"passed", failed == 0}};
    std::cout << summary.dump() << "\n";
    return failed == 0 ? kOk : kValidationFailure;
}

int cmd_map_info(const std::string& path, double threshold)
{
    try {
        const auto traj = tpf::io::read_map_trajectory_file(path);
        std::printf("dim=%d n_times=%zu dt=%.17g\n", traj.dim(), traj.size(), traj.grid().dt());
        std::printf("t,trace_preserving_residual,choi_min_eigenvalue,unital_residual,condition_number,singular,spike\n");
        tpf::dyn::InvertibilityOptions opts;
        opts.condition_threshold = threshold;
        const auto inv = tpf::dyn::invertibility_report(traj, opts);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto c = tpf::cptp_diagnostics(traj.map(i));
            std::printf("%s,%s,%s,%s,%s,%d,%d\n", tpf::io::format_number(traj.time(i)).c_str(),
                        tpf::io::format_number(c.trace_preserving_residual).c_str(),
                        tpf::io::format_number(c.choi_min_eigenvalue).c_str(),
                        tpf::io::format_number(c.unital_residual).c_str(),
                        tpf::io::format_number(inv[i].condition_number).c_str(), inv[i].singular ? 1 : 0,
                        inv[i].spike ? 1 : 0);
        }
    } catch (const std::exception& e) {
        std::cerr << "map-info: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"tpflux: work, heat and fluctuation factors of open quantum dynamics"};
    app.set_version_flag("--version", tpf::scenario::kToolVersion);
    app.require_subcommand(1);

    std::string config;
    auto* run = app.add_subcommand("run", "evaluate a scenario config and write CSV outputs");
    run->add_option("config", config, "scenario INI file")->required();

    bool full = false;
    auto* val = app.add_subcommand("validate", "run the built-in invariant suites");
    val->add_flag("--full", full, "include refinement studies and larger ensembles");

    std::string map_path;
    double threshold = tpf::kDefaultConditionThreshold;
    auto* info = app.add_subcommand("map-info", "CPTP diagnostics and invertibility of a map file");
    info->add_option("map_file", map_path, "map trajectory CSV")->required();
    info->add_option("--condition-threshold", threshold, "singular-map threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*run) return cmd_run(config);
    if (*val) return cmd_validate(full);
    if (*info) return cmd_map_info(map_path, threshold);
    return kConfigError;
}
