#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpf/errors.hpp"
#include "tpf/io.hpp"
#include "tpf/random.hpp"
#include "tpf/scenario.hpp"
#include "tpf/validation.hpp"

using namespace tpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("tpflux_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

scenario::ScenarioConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return scenario::parse_config(in);
}

} // namespace

TEST(MapFile, RoundTripIsExact)
{
    rnd::TrajectorySpec spec;
    spec.dim = 3;
    spec.n_steps = 20;
    const auto traj = rnd::random_trajectory(spec, 61);
    std::stringstream buf;
    io::write_map_trajectory(buf, traj);
    const auto back = io::read_map_trajectory(buf);
    ASSERT_EQ(back.size(), traj.size());
    EXPECT_EQ(back.grid().dt(), traj.grid().dt());
    for (std::size_t i = 0; i < traj.size(); ++i) EXPECT_EQ(max_abs(back.map(i).matrix() - traj.map(i).matrix()), 0.0);
}

TEST(MapFile, ErrorsCarryLineNumbers)
{
    std::stringstream buf;
    io::write_map_trajectory(buf, rnd::random_trajectory({}, 62));
    std::string text = buf.str();
    // corrupt the second data row
    std::size_t pos = 0;
    for (int k = 0; k < 6; ++k) pos = text.find('\n', pos) + 1;
    text.insert(text.find(',', pos) + 1, "x");
    std::istringstream in(text);
    try {
        io::read_map_trajectory(in);
        FAIL() << "expected a parse error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
    }
}

TEST(MapFile, NumberFormatting)
{
    EXPECT_EQ(io::format_number(-0.0), "0");
    EXPECT_EQ(std::stod(io::format_number(0.1)), 0.1);
}

TEST(Config, DefaultsAreRecorded)
{
    const auto cfg = parse("[model]\nkind = weak_coupling\n[thermo]\nbeta = 1, 3\n");
    EXPECT_EQ(cfg.model, scenario::ModelKind::weak_coupling);
    ASSERT_EQ(cfg.betas.size(), 2u);
    EXPECT_EQ(cfg.betas[1], 3.0);
    EXPECT_NEAR(cfg.t_max, cfg.weak_coupling.t_f(), 1e-12);
    const auto has = [&](const std::string& k) {
        return std::find(cfg.defaulted.begin(), cfg.defaulted.end(), k) != cfg.defaulted.end();
    };
    EXPECT_TRUE(has("grid.n_steps"));
    EXPECT_TRUE(has("weak_coupling.gamma"));
    EXPECT_FALSE(has("thermo.beta"));
    EXPECT_FALSE(has("jaynes_cummings.g"));
}

TEST(Config, SyntaxErrorReportsLine)
{
    try {
        parse("[model]\nkind = jaynes_cummings\n[grid\nt_max = 3\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Config, UnknownKeysAndBadValuesAreRejected)
{
    EXPECT_THROW(parse("[model]\nkind = weak_coupling\n[grid]\nt_maxx = 3\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nkind = heat_engine\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nkind = weak_coupling\n[grid]\nn_steps = ten\n"), ConfigError);
    auto bad = parse("[model]\nkind = weak_coupling\n[thermo]\nbeta = -1\n");
    EXPECT_THROW(scenario::validate(bad), ConfigError);
    auto few = parse("[model]\nkind = weak_coupling\n[grid]\nn_steps = 8\n");
    EXPECT_THROW(scenario::validate(few), ConfigError);
    auto missing = parse("[model]\nkind = custom_map_file\n[map_file]\npath = /nonexistent/maps.csv\n");
    EXPECT_THROW(scenario::validate(missing), ConfigError);
}

TEST(Config, ManifestRoundTrip)
{
    const auto cfg = parse("[model]\nkind = jaynes_cummings\n[jaynes_cummings]\ng = 0.05\n[grid]\nt_max = 12\n"
                           "[thermo]\nbeta = 0.5, 2\n[output]\ndistribution_times = 3, 6\n");
    std::stringstream manifest;
    scenario::write_manifest(manifest, cfg);
    const auto back = scenario::parse_config(manifest);
    EXPECT_TRUE(scenario::equivalent(cfg, back)) << manifest.str();
    auto other = cfg;
    other.jaynes_cummings.g = 0.06;
    EXPECT_FALSE(scenario::equivalent(cfg, other));
}

TEST(Run, OutputsAreDeterministic)
{
    std::string text = "[model]\nkind = weak_coupling\n[grid]\nn_steps = 200\n[thermo]\nbeta = 1, 3\n"
                       "[output]\ndistribution_times = 5\ndirectory = ";
    std::vector<fs::path> dirs{scratch_dir("det_a"), scratch_dir("det_b")};
    for (const auto& d : dirs) {
        auto cfg = parse(text + d.string() + "\n");
        scenario::validate(cfg);
        const auto res = scenario::run(cfg);
        EXPECT_TRUE(res.numerical_failures.empty());
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const auto name = entry.path().filename();
        if (name == "run_manifest.ini") continue;
        EXPECT_EQ(slurp(entry.path()), slurp(dirs[1] / name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 4u);
    for (const auto& d : dirs) fs::remove_all(d);
}

TEST(Run, UncoupledDriveGivesUnitFactors)
{
    const auto dir = scratch_dir("closed");
    auto cfg = parse("[model]\nkind = custom_pc\n[custom_pc]\ndelta = 1\nOmega = 0.3\n[grid]\nt_max = 5\nn_steps = 100\n"
                     "[output]\ndistributions = false\ndirectory = " + dir.string() + "\n");
    scenario::run(cfg);
    std::ifstream in(dir / "lambda_series.csv");
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> cols;
    std::stringstream hs(header);
    for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
    const auto col = std::find(cols.begin(), cols.end(), "lambda_w") - cols.begin();
    ASSERT_LT(static_cast<std::size_t>(col), cols.size());
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        for (long k = 0; k <= col; ++k) std::getline(ls, cell, ',');
        EXPECT_NEAR(std::stod(cell), 1.0, 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 101);
    fs::remove_all(dir);
}

TEST(Validation, FastSuitePasses)
{
    for (const auto& r : validation::run_suite(validation::Level::fast)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}
