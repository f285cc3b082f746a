// scenario.cpp: INI scenario configuration and the batch runner

#include "tpf/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tpf/errors.hpp"
#include "tpf/io.hpp"
#include "tpf/observables.hpp"
#include "tpf/phase_covariant.hpp"
#include "tpf/pipeline.hpp"
#include "tpf/tpms.hpp"

namespace tpf::scenario {

const char* const kToolVersion = "tpflux 0.3.0";

namespace fs = std::filesystem;
using boost::property_tree::ptree;

std::string to_string(ModelKind m)
{
    switch (m) {
    case ModelKind::weak_coupling: return "weak_coupling";
    case ModelKind::jaynes_cummings: return "jaynes_cummings";
    case ModelKind::custom_pc: return "custom_pc";
    case ModelKind::custom_map_file: return "custom_map_file";
    case ModelKind::closed_coherent: return "closed_coherent";
    }
    return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"model", {"kind"}},
        {"weak_coupling", {"omega0", "delta", "Omega", "gamma", "gamma_z", "drive_mode"}},
        {"jaynes_cummings", {"omega", "omega_m", "g", "n_max"}},
        {"custom_pc", {"omega0", "delta", "Omega", "gamma_plus", "gamma_minus", "gamma_z"}},
        {"map_file", {"path"}},
        {"closed_coherent", {"omega0", "delta", "Omega", "field_x", "bloch_x", "bloch_y", "bloch_z"}},
        {"grid", {"t_max", "n_steps"}},
        {"thermo", {"beta"}},
        {"output", {"directory", "lambda_series", "distributions", "invertibility", "coefficients",
                    "distribution_times"}},
        {"tolerances", {"condition_threshold", "condition_warning", "cluster_tol"}},
        {"manifest", {"tool_version", "defaulted"}},
    };
    return s;
}

[[noreturn]] void field_error(const std::string& field, const std::string& what)
{
    throw ConfigError(0, "config field '" + field + "': " + what);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& field, const std::string& raw)
{
    const std::string s = trim(raw);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) field_error(field, "cannot parse '" + raw + "' as a real number");
    return v;
}

int parse_int(const std::string& field, const std::string& raw)
{
    const std::string s = trim(raw);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) field_error(field, "cannot parse '" + raw + "' as an integer");
    return v;
}

bool parse_bool(const std::string& field, const std::string& raw)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    field_error(field, "expected true/false, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& raw)
{
    std::vector<double> out;
    if (trim(raw).empty()) return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(field, item));
    return out;
}

class Reader {
public:
    Reader(const ptree& root, std::vector<std::string>& defaulted) : root_(root), defaulted_(defaulted) {}

    // Only keys of sections marked active are reported as defaulted.
    void set_active(const std::string& section, bool active) { active_[section] = active; }

    template <class T, class Parse>
    void get(const std::string& section, const std::string& key, T& out, Parse parse)
    {
        const std::string field = section + "." + key;
        const auto sec = root_.get_child_optional(section);
        const auto val = sec ? sec->get_optional<std::string>(key) : boost::none;
        if (val) {
            out = parse(field, *val);
        } else if (active_[section]) {
            defaulted_.push_back(field);
        }
    }

    void real(const std::string& s, const std::string& k, double& out) { get(s, k, out, parse_real); }
    void integer(const std::string& s, const std::string& k, int& out) { get(s, k, out, parse_int); }
    void boolean(const std::string& s, const std::string& k, bool& out) { get(s, k, out, parse_bool); }
    void list(const std::string& s, const std::string& k, std::vector<double>& out) { get(s, k, out, parse_list); }
    void text(const std::string& s, const std::string& k, std::string& out)
    {
        get(s, k, out, [](const std::string&, const std::string& v) { return trim(v); });
    }

private:
    const ptree& root_;
    std::vector<std::string>& defaulted_;
    std::map<std::string, bool> active_;
};

ModelKind parse_model(const std::string& field, const std::string& raw)
{
    const std::string s = trim(raw);
    for (auto m : {ModelKind::weak_coupling, ModelKind::jaynes_cummings, ModelKind::custom_pc,
                   ModelKind::custom_map_file, ModelKind::closed_coherent}) {
        if (s == to_string(m)) return m;
    }
    field_error(field, "unknown model '" + raw + "'");
}

models::DriveMode parse_drive(const std::string& field, const std::string& raw)
{
    const std::string s = trim(raw);
    if (s == "monotonic") return models::DriveMode::monotonic;
    if (s == "periodic") return models::DriveMode::periodic;
    field_error(field, "expected monotonic or periodic, got '" + raw + "'");
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (double x : v) {
        if (!s.empty()) s += ',';
        s += io::format_number(x);
    }
    return s;
}

std::string fmt(double x)
{
    return io::format_number(x);
}

} // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& base_directory)
{
    ptree root;
    try {
        boost::property_tree::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        std::ostringstream msg;
        msg << "config line " << e.line() << ": " << e.message();
        throw ConfigError(static_cast<int>(e.line()), msg.str());
    }

    for (const auto& [section, body] : root) {
        const auto it = schema().find(section);
        if (body.empty() && !body.data().empty()) field_error(section, "key outside of any section");
        if (it == schema().end()) field_error(section, "unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) field_error(section + "." + key, "unknown key");
        }
    }

    ScenarioConfig cfg;
    cfg.base_directory = base_directory;
    Reader r(root, cfg.defaulted);
    for (const char* s : {"model", "grid", "thermo", "output", "tolerances"}) r.set_active(s, true);

    r.get("model", "kind", cfg.model, parse_model);
    switch (cfg.model) {
    case ModelKind::weak_coupling: r.set_active("weak_coupling", true); break;
    case ModelKind::jaynes_cummings: r.set_active("jaynes_cummings", true); break;
    case ModelKind::custom_pc: r.set_active("custom_pc", true); break;
    case ModelKind::custom_map_file: r.set_active("map_file", true); break;
    case ModelKind::closed_coherent: r.set_active("closed_coherent", true); break;
    }

    auto& wc = cfg.weak_coupling;
    r.real("weak_coupling", "omega0", wc.omega0);
    r.real("weak_coupling", "delta", wc.delta);
    r.real("weak_coupling", "Omega", wc.Omega);
    r.real("weak_coupling", "gamma", wc.gamma);
    r.real("weak_coupling", "gamma_z", wc.gamma_z);
    r.get("weak_coupling", "drive_mode", wc.drive_mode, parse_drive);

    auto& jc = cfg.jaynes_cummings;
    r.real("jaynes_cummings", "omega", jc.omega);
    r.real("jaynes_cummings", "omega_m", jc.omega_m);
    r.real("jaynes_cummings", "g", jc.g);
    r.integer("jaynes_cummings", "n_max", jc.n_max);

    auto& pc = cfg.custom_pc;
    r.real("custom_pc", "omega0", pc.omega0);
    r.real("custom_pc", "delta", pc.delta);
    r.real("custom_pc", "Omega", pc.Omega);
    r.real("custom_pc", "gamma_plus", pc.gamma_plus);
    r.real("custom_pc", "gamma_minus", pc.gamma_minus);
    r.real("custom_pc", "gamma_z", pc.gamma_z);

    r.text("map_file", "path", cfg.map_file);

    auto& cc = cfg.closed_coherent;
    r.real("closed_coherent", "omega0", cc.omega0);
    r.real("closed_coherent", "delta", cc.delta);
    r.real("closed_coherent", "Omega", cc.Omega);
    r.real("closed_coherent", "field_x", cc.field_x);
    r.real("closed_coherent", "bloch_x", cc.bloch_x);
    r.real("closed_coherent", "bloch_y", cc.bloch_y);
    r.real("closed_coherent", "bloch_z", cc.bloch_z);

    const std::size_t before = cfg.defaulted.size();
    r.real("grid", "t_max", cfg.t_max);
    // the weak-coupling protocol length follows from its drive when not given
    if (cfg.defaulted.size() > before && cfg.model == ModelKind::weak_coupling && wc.Omega > 0.0) cfg.t_max = wc.t_f();
    r.integer("grid", "n_steps", cfg.n_steps);
    r.list("thermo", "beta", cfg.betas);

    auto& out = cfg.output;
    r.text("output", "directory", out.directory);
    r.boolean("output", "lambda_series", out.lambda_series);
    r.boolean("output", "distributions", out.distributions);
    r.boolean("output", "invertibility", out.invertibility);
    r.boolean("output", "coefficients", out.coefficients);
    r.list("output", "distribution_times", out.distribution_times);

    auto& tol = cfg.tolerances;
    r.real("tolerances", "condition_threshold", tol.condition_threshold);
    r.real("tolerances", "condition_warning", tol.condition_warning);
    r.real("tolerances", "cluster_tol", tol.cluster_tol);
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    const fs::path parent = fs::path(path).parent_path();
    try {
        return parse_config(in, parent.empty() ? "." : parent.string());
    } catch (const ConfigError& e) {
        throw ConfigError(e.line(), path + ": " + e.what());
    }
}

void validate(const ScenarioConfig& cfg)
{
    if (!(cfg.t_max > 0.0)) field_error("grid.t_max", "must be > 0");
    if (cfg.n_steps < 16) field_error("grid.n_steps", "must be >= 16");
    if (cfg.model != ModelKind::closed_coherent) {
        if (cfg.betas.empty()) field_error("thermo.beta", "at least one value required");
        for (double b : cfg.betas) {
            if (!(b > 0.0) || !std::isfinite(b)) field_error("thermo.beta", "values must be finite and > 0");
        }
    }
    for (double t : cfg.output.distribution_times) {
        if (!(t >= 0.0) || t > cfg.t_max * (1.0 + 1e-12)) field_error("output.distribution_times", "times must lie in [0, t_max]");
    }
    if (!(cfg.tolerances.condition_threshold > 1.0)) field_error("tolerances.condition_threshold", "must be > 1");
    if (!(cfg.tolerances.cluster_tol > 0.0)) field_error("tolerances.cluster_tol", "must be > 0");

    switch (cfg.model) {
    case ModelKind::weak_coupling: {
        const auto& p = cfg.weak_coupling;
        if (!(p.gamma >= 0.0)) field_error("weak_coupling.gamma", "must be >= 0");
        if (!(p.gamma_z >= 0.0)) field_error("weak_coupling.gamma_z", "must be >= 0");
        if (!(p.Omega > 0.0)) field_error("weak_coupling.Omega", "must be > 0");
        if (!(p.omega0 > 0.0)) field_error("weak_coupling.omega0", "must be > 0");
        break;
    }
    case ModelKind::jaynes_cummings: {
        const auto& p = cfg.jaynes_cummings;
        if (!(p.omega_m > 0.0)) field_error("jaynes_cummings.omega_m", "must be > 0");
        if (p.n_max != 0 && p.n_max < 2) field_error("jaynes_cummings.n_max", "must be 0 (automatic) or >= 2");
        break;
    }
    case ModelKind::custom_pc: {
        const auto& p = cfg.custom_pc;
        if (!(p.gamma_plus >= 0.0 && p.gamma_minus >= 0.0 && p.gamma_z >= 0.0)) {
            field_error("custom_pc", "rates must be >= 0");
        }
        break;
    }
    case ModelKind::custom_map_file: {
        if (cfg.map_file.empty()) field_error("map_file.path", "required for model custom_map_file");
        fs::path p(cfg.map_file);
        if (p.is_relative()) p = fs::path(cfg.base_directory) / p;
        if (!fs::exists(p)) field_error("map_file.path", "file '" + p.string() + "' does not exist");
        break;
    }
    case ModelKind::closed_coherent: {
        const auto& p = cfg.closed_coherent;
        const double r2 = p.bloch_x * p.bloch_x + p.bloch_y * p.bloch_y + p.bloch_z * p.bloch_z;
        if (!(r2 < 1.0)) field_error("closed_coherent.bloch_*", "Bloch vector must lie strictly inside the unit ball");
        break;
    }
    }
}

void write_manifest(std::ostream& os, const ScenarioConfig& cfg)
{
    auto b = [](bool v) { return v ? "true" : "false"; };
    os << "[model]\nkind = " << to_string(cfg.model) << "\n\n";
    switch (cfg.model) {
    case ModelKind::weak_coupling: {
        const auto& p = cfg.weak_coupling;
        os << "[weak_coupling]\nomega0 = " << fmt(p.omega0) << "\ndelta = " << fmt(p.delta) << "\nOmega = " << fmt(p.Omega)
           << "\ngamma = " << fmt(p.gamma) << "\ngamma_z = " << fmt(p.gamma_z) << "\ndrive_mode = "
           << (p.drive_mode == models::DriveMode::monotonic ? "monotonic" : "periodic") << "\n\n";
        break;
    }
    case ModelKind::jaynes_cummings: {
        const auto& p = cfg.jaynes_cummings;
        os << "[jaynes_cummings]\nomega = " << fmt(p.omega) << "\nomega_m = " << fmt(p.omega_m) << "\ng = " << fmt(p.g)
           << "\nn_max = " << p.n_max << "\n\n";
        break;
    }
    case ModelKind::custom_pc: {
        const auto& p = cfg.custom_pc;
        os << "[custom_pc]\nomega0 = " << fmt(p.omega0) << "\ndelta = " << fmt(p.delta) << "\nOmega = " << fmt(p.Omega)
           << "\ngamma_plus = " << fmt(p.gamma_plus) << "\ngamma_minus = " << fmt(p.gamma_minus)
           << "\ngamma_z = " << fmt(p.gamma_z) << "\n\n";
        break;
    }
    case ModelKind::custom_map_file: {
        fs::path p(cfg.map_file);
        if (p.is_relative()) p = fs::absolute(fs::path(cfg.base_directory) / p);
        os << "[map_file]\npath = " << p.string() << "\n\n";
        break;
    }
    case ModelKind::closed_coherent: {
        const auto& p = cfg.closed_coherent;
        os << "[closed_coherent]\nomega0 = " << fmt(p.omega0) << "\ndelta = " << fmt(p.delta) << "\nOmega = "
           << fmt(p.Omega) << "\nfield_x = " << fmt(p.field_x) << "\nbloch_x = " << fmt(p.bloch_x)
           << "\nbloch_y = " << fmt(p.bloch_y) << "\nbloch_z = " << fmt(p.bloch_z) << "\n\n";
        break;
    }
    }
    os << "[grid]\nt_max = " << fmt(cfg.t_max) << "\nn_steps = " << cfg.n_steps << "\n\n";
    os << "[thermo]\nbeta = " << join(cfg.betas) << "\n\n";
    const auto& o = cfg.output;
    os << "[output]\ndirectory = " << o.directory << "\nlambda_series = " << b(o.lambda_series)
       << "\ndistributions = " << b(o.distributions) << "\ninvertibility = " << b(o.invertibility)
       << "\ncoefficients = " << b(o.coefficients) << "\ndistribution_times = " << join(o.distribution_times) << "\n\n";
    const auto& t = cfg.tolerances;
    os << "[tolerances]\ncondition_threshold = " << fmt(t.condition_threshold) << "\ncondition_warning = "
       << fmt(t.condition_warning) << "\ncluster_tol = " << fmt(t.cluster_tol) << "\n\n";
    std::string d;
    for (const auto& k : cfg.defaulted) d += (d.empty() ? "" : ",") + k;
    os << "[manifest]\ntool_version = " << kToolVersion << "\ndefaulted = " << d << "\n";
}

bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b)
{
    if (a.model != b.model || a.t_max != b.t_max || a.n_steps != b.n_steps || a.betas != b.betas) return false;
    const auto &oa = a.output, &ob = b.output;
    if (oa.directory != ob.directory || oa.lambda_series != ob.lambda_series || oa.distributions != ob.distributions
        || oa.invertibility != ob.invertibility || oa.coefficients != ob.coefficients
        || oa.distribution_times != ob.distribution_times) {
        return false;
    }
    const auto &ta = a.tolerances, &tb = b.tolerances;
    if (ta.condition_threshold != tb.condition_threshold || ta.condition_warning != tb.condition_warning
        || ta.cluster_tol != tb.cluster_tol) {
        return false;
    }
    switch (a.model) {
    case ModelKind::weak_coupling: {
        const auto &p = a.weak_coupling, &q = b.weak_coupling;
        return p.omega0 == q.omega0 && p.delta == q.delta && p.Omega == q.Omega && p.gamma == q.gamma
               && p.gamma_z == q.gamma_z && p.drive_mode == q.drive_mode;
    }
    case ModelKind::jaynes_cummings: {
        const auto &p = a.jaynes_cummings, &q = b.jaynes_cummings;
        return p.omega == q.omega && p.omega_m == q.omega_m && p.g == q.g && p.n_max == q.n_max;
    }
    case ModelKind::custom_pc: {
        const auto &p = a.custom_pc, &q = b.custom_pc;
        return p.omega0 == q.omega0 && p.delta == q.delta && p.Omega == q.Omega && p.gamma_plus == q.gamma_plus
               && p.gamma_minus == q.gamma_minus && p.gamma_z == q.gamma_z;
    }
    case ModelKind::custom_map_file: {
        auto resolve = [](const ScenarioConfig& c) {
            fs::path p(c.map_file);
            if (p.is_relative()) p = fs::path(c.base_directory) / p;
            return fs::weakly_canonical(p);
        };
        return resolve(a) == resolve(b);
    }
    case ModelKind::closed_coherent: {
        const auto &p = a.closed_coherent, &q = b.closed_coherent;
        return p.omega0 == q.omega0 && p.delta == q.delta && p.Omega == q.Omega && p.field_x == q.field_x
               && p.bloch_x == q.bloch_x && p.bloch_y == q.bloch_y && p.bloch_z == q.bloch_z;
    }
    }
    return false;
}

// --- runner ------------------------------------------------------------------

namespace {

struct Distribution {
    std::string observable;
    tpms::OutcomeDistribution dist;
};

struct BetaResult {
    double beta = 0.0;
    std::vector<tpms::FluctuationReport> rows;
    std::vector<dyn::InvertibilityRow> invertibility;
    std::vector<std::vector<Distribution>> distributions;  // per requested time
    std::vector<double> distribution_grid_times;
    std::vector<std::string> coefficient_rows;
    std::vector<std::string> warnings;
    std::vector<std::string> failures;
};

std::string row(std::initializer_list<double> values)
{
    std::string s;
    for (double v : values) {
        if (!s.empty()) s += ',';
        s += fmt(v);
    }
    return s;
}

std::size_t nearest_index(const UniformGrid& grid, double t)
{
    return grid.index_of(t);
}

pc::PCRates custom_rates(const CustomPCParams& p)
{
    return {
        [p](double t) { const double s = std::sin(p.Omega * t); return p.omega0 + p.delta * s * s; },
        [p](double) { return p.gamma_plus; },
        [p](double) { return p.gamma_minus; },
        [p](double) { return p.gamma_z; },
    };
}

std::vector<double> requested_times(const ScenarioConfig& cfg, double t_end)
{
    if (!cfg.output.distribution_times.empty()) return cfg.output.distribution_times;
    return {t_end};
}

BetaResult evaluate_beta(const ScenarioConfig& cfg, double beta, const dyn::MapTrajectory* shared)
{
    BetaResult res;
    res.beta = beta;
    const UniformGrid grid(cfg.t_max, cfg.n_steps);

    std::optional<dyn::MapTrajectory> built;
    std::optional<pc::PCSolution> pc_sol;
    switch (cfg.model) {
    case ModelKind::weak_coupling: {
        auto p = cfg.weak_coupling;
        p.beta = beta;
        pc_sol = pc::solve(models::weak_coupling_rates(p), grid);
        built = pc::pc_trajectory(*pc_sol);
        break;
    }
    case ModelKind::custom_pc:
        pc_sol = pc::solve(custom_rates(cfg.custom_pc), grid);
        built = pc::pc_trajectory(*pc_sol);
        break;
    case ModelKind::jaynes_cummings: {
        auto p = cfg.jaynes_cummings;
        p.beta = beta;
        p.t_max = cfg.t_max;
        p.n_steps = cfg.n_steps;
        built = models::jc_reduced_map(p);
        break;
    }
    case ModelKind::custom_map_file:
    case ModelKind::closed_coherent:
        break;
    }
    const dyn::MapTrajectory& traj = built ? *built : *shared;

    thermo::PathOptions popts;
    popts.condition_threshold = cfg.tolerances.condition_threshold;
    const auto analysis = thermo::analyze_path(traj, popts);
    if (analysis.singular_time) {
        std::ostringstream msg;
        msg << "beta=" << fmt(beta) << ": singular map at t=" << fmt(*analysis.singular_time)
            << " (condition number " << fmt(*analysis.singular_condition) << "); series truncated there";
        res.failures.push_back(msg.str());
    }

    res.rows = pipeline::lambda_series(traj, analysis, beta);

    dyn::InvertibilityOptions iopts;
    iopts.condition_threshold = cfg.tolerances.condition_threshold;
    res.invertibility = dyn::invertibility_report(traj, iopts);
    for (const auto& r : res.invertibility) {
        if (r.condition_number > cfg.tolerances.condition_warning) {
            std::ostringstream msg;
            msg << "beta=" << fmt(beta) << ": condition number of the map exceeds " << fmt(cfg.tolerances.condition_warning)
                << " from t=" << fmt(r.time) << " on; inverse-map quantities are unreliable";
            res.warnings.push_back(msg.str());
            break;
        }
    }

    if (cfg.output.distributions) {
        const DensityMatrix rho0 = gibbs_state(analysis.K.front(), beta);
        const int d = traj.dim();
        for (double t : requested_times(cfg, traj.grid().t_max())) {
            const std::size_t i = nearest_index(traj.grid(), t);
            res.distribution_grid_times.push_back(traj.time(i));
            std::vector<Distribution> set;
            if (i >= analysis.n_valid) {
                std::ostringstream msg;
                msg << "beta=" << fmt(beta) << ": distribution at t=" << fmt(traj.time(i))
                    << " skipped, past the first singular map";
                res.failures.push_back(msg.str());
                res.distributions.push_back(std::move(set));
                continue;
            }
            const auto& K0 = analysis.K.front();
            const auto& Kt = analysis.K[i];
            const auto& Pt = analysis.path[i];
            const double ct = cfg.tolerances.cluster_tol;
            set.push_back({"internal_energy", tpms::tpms_distribution(rho0, traj.map(i), K0, Kt, ct)});
            set.push_back({"work", tpms::tpms_distribution(rho0, traj.map(i), K0, Kt - Pt, ct)});
            set.push_back({"heat", tpms::tpms_distribution(rho0, traj.map(i), HermitianOperator::zero(d), Pt, ct)});
            res.distributions.push_back(std::move(set));
        }
    }

    if (cfg.output.coefficients && pc_sol) {
        const auto& c = pc_sol->coeffs;
        const auto& th = pc_sol->thermo;
        for (std::size_t i = 0; i < pc_sol->grid.size(); ++i) {
            const auto cf = pc::closed_form(*pc_sol, beta, i);
            res.coefficient_rows.push_back(row({beta, pc_sol->grid.time(i), c.a[i], c.b[i], c.c[i], c.d_par[i],
                                                c.d_perp[i], c.I[i], c.J[i], th.P0[i], th.P3[i], th.W0[i], th.W3[i],
                                                cf.lambda_w, cf.lambda_w_bound}));
        }
    } else if (cfg.output.coefficients && cfg.model == ModelKind::jaynes_cummings) {
        dyn::GeneratorOptions gopts;
        gopts.condition_threshold = cfg.tolerances.condition_threshold;
        const auto ex = models::jc_extract_pc(traj, gopts);
        for (std::size_t i = 0; i < ex.times.size(); ++i) {
            res.coefficient_rows.push_back(row({beta, ex.times[i], ex.omega[i], ex.gamma_plus[i], ex.gamma_minus[i],
                                                ex.gamma_z[i], ex.residual[i]})
                                           + (ex.singular[i] ? ",1" : ",0"));
        }
    }
    return res;
}

void write_lines(const fs::path& path, const std::string& header, const std::vector<std::string>& lines,
                 RunResult& result)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << header << "\n";
    for (const auto& l : lines) out << l << "\n";
    result.files.push_back(path.string());
}

std::string time_label(double t)
{
    std::ostringstream s;
    s << t;
    return s.str();
}

RunResult run_coherent(const ScenarioConfig& cfg, const fs::path& dir)
{
    RunResult result;
    const auto& p = cfg.closed_coherent;
    models::ClosedDriveParams dp{p.omega0, p.delta, p.Omega, p.field_x, cfg.t_max, cfg.n_steps};
    const auto drive = models::closed_drive(dp);
    const auto& H0 = drive.hamiltonians.front();

    Matrix rho = Matrix::Identity(2, 2) * 0.5;
    rho += 0.5 * (p.bloch_x * pauli::x() + p.bloch_y * pauli::y() + p.bloch_z * pauli::z());
    const DensityMatrix rho0(rho);
    const auto data = thermo::coherent_initial_construction(rho0, H0);

    std::vector<std::string> lines;
    for (std::size_t i = 0; i < drive.traj.size(); ++i) {
        const auto& map = drive.traj.map(i);
        const auto& Ht = drive.hamiltonians[i];
        const auto r = thermo::coherent_work_fluctuation(data, map, Ht);
        const double mean_w = Ht.expectation(tpf::apply(map, rho0.matrix())) - H0.expectation(rho0.matrix());
        lines.push_back(row({drive.traj.time(i), data.beta, r.value, r.golden_thompson, r.chain_bound,
                             r.jarzynski_factor, r.delta_F_bar, mean_w, data.lambda_min_xi}));
    }
    if (cfg.output.lambda_series) {
        write_lines(dir / "coherent_series.csv",
                    "t,beta,exp_avg_w,golden_thompson,chain_bound,jarzynski_factor,delta_F_bar,mean_w,lambda_min_xi",
                    lines, result);
    }

    if (cfg.output.distributions) {
        for (double t : requested_times(cfg, drive.traj.grid().t_max())) {
            const std::size_t i = nearest_index(drive.traj.grid(), t);
            const auto& map = drive.traj.map(i);
            const auto obs = thermo::coherent_work_observables(data, rho0, H0, map, drive.hamiltonians[i]);
            const auto dist = tpms::tpms_distribution(rho0, map, obs.initial, obs.final, cfg.tolerances.cluster_tol);
            std::vector<std::string> dl;
            for (std::size_t k = 0; k < dist.outcomes.size(); ++k) {
                dl.push_back(fmt(data.beta) + ",work," + fmt(dist.outcomes[k]) + "," + fmt(dist.probs[k]));
            }
            write_lines(dir / ("distribution_t" + time_label(drive.traj.time(i)) + ".csv"),
                        "beta,observable,outcome,probability", dl, result);
        }
    }
    return result;
}

} // namespace

RunResult run(const ScenarioConfig& cfg)
{
    validate(cfg);
    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);

    RunResult result;
    if (cfg.model == ModelKind::closed_coherent) {
        result = run_coherent(cfg, dir);
        if (cfg.defaulted.end() == std::find(cfg.defaulted.begin(), cfg.defaulted.end(), "thermo.beta")) {
            result.warnings.push_back("thermo.beta is ignored for closed_coherent; beta follows from the initial state");
        }
    } else {
        std::optional<dyn::MapTrajectory> shared;
        if (cfg.model == ModelKind::custom_map_file) {
            fs::path p(cfg.map_file);
            if (p.is_relative()) p = fs::path(cfg.base_directory) / p;
            shared = io::read_map_trajectory_file(p.string());
        }
        // one task per beta; results are collected in beta order so files do not
        // depend on scheduling
        std::vector<std::future<BetaResult>> tasks;
        for (double beta : cfg.betas) {
            tasks.push_back(std::async(std::launch::async, [&cfg, beta, &shared] {
                BetaResult r;
                try {
                    r = evaluate_beta(cfg, beta, shared ? &*shared : nullptr);
                } catch (const TruncationError& e) {
                    r.beta = beta;
                    r.failures.push_back("beta=" + fmt(beta) + ": " + e.what());
                } catch (const SingularMap& e) {
                    r.beta = beta;
                    std::string where = e.time() ? " at t=" + fmt(*e.time()) : std::string();
                    r.failures.push_back("beta=" + fmt(beta) + where + ": " + e.what());
                }
                return r;
            }));
        }
        std::vector<BetaResult> results;
        for (auto& t : tasks) results.push_back(t.get());

        std::vector<std::string> lambda_lines, inv_lines, coeff_lines;
        std::map<double, std::vector<std::string>> dist_lines;
        for (const auto& r : results) {
            for (const auto& rep : r.rows) lambda_lines.push_back(tpms::report_csv_row(rep));
            for (const auto& iv : r.invertibility) {
                inv_lines.push_back(row({r.beta, iv.time, iv.condition_number}) + (iv.singular ? ",1" : ",0")
                                    + (iv.spike ? ",1" : ",0"));
            }
            for (std::size_t k = 0; k < r.distributions.size(); ++k) {
                auto& lines = dist_lines[r.distribution_grid_times[k]];
                for (const auto& d : r.distributions[k]) {
                    for (std::size_t j = 0; j < d.dist.outcomes.size(); ++j) {
                        lines.push_back(fmt(r.beta) + "," + d.observable + "," + fmt(d.dist.outcomes[j]) + ","
                                        + fmt(d.dist.probs[j]));
                    }
                }
            }
            coeff_lines.insert(coeff_lines.end(), r.coefficient_rows.begin(), r.coefficient_rows.end());
            result.warnings.insert(result.warnings.end(), r.warnings.begin(), r.warnings.end());
            result.numerical_failures.insert(result.numerical_failures.end(), r.failures.begin(), r.failures.end());
        }

        if (cfg.output.lambda_series) write_lines(dir / "lambda_series.csv", tpms::report_csv_header(), lambda_lines, result);
        if (cfg.output.invertibility) {
            write_lines(dir / "invertibility.csv", "beta,t,condition_number,singular,spike", inv_lines, result);
        }
        if (cfg.output.distributions) {
            for (const auto& [t, lines] : dist_lines) {
                write_lines(dir / ("distribution_t" + time_label(t) + ".csv"), "beta,observable,outcome,probability",
                            lines, result);
            }
        }
        if (cfg.output.coefficients && !coeff_lines.empty()) {
            if (cfg.model == ModelKind::jaynes_cummings) {
                write_lines(dir / "jc_rates.csv", "beta,t,omega,gamma_plus,gamma_minus,gamma_z,residual,singular",
                            coeff_lines, result);
            } else {
                write_lines(dir / "pc_coefficients.csv",
                            "beta,t,a,b,c,d_par,d_perp,I,J,P0,P3,W0,W3,lambda_w_closed_form,lambda_w_bound_closed_form",
                            coeff_lines, result);
            }
        }
    }

    std::ofstream manifest(dir / "run_manifest.ini");
    write_manifest(manifest, cfg);
    result.files.push_back((dir / "run_manifest.ini").string());
    return result;
}

} // namespace tpf::scenario
