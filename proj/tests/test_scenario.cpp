#include "efqs/config.hpp"
#include "efqs/errors.hpp"
#include "efqs/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace efqs;

namespace {

const char* const kScenario = R"(
[model]
J = 1
hx = 1.2
hz = 0.8
L = 6, 8

[filter]
tau_start = 0
tau_stop = 2
tau_steps = 5

[measurements]
observables = z@L/2
correlators = 1,L
entropy_regions = 1:L/2
entropy_n = 1, 2
mutual_info = 1|L
variance = true
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream     f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST(Scenario, TablesAndHeaders) {
    const auto tables = compute_scenario(parse_config(kScenario));
    ASSERT_EQ(tables.size(), 5u);
    EXPECT_EQ(tables[0].name(), "observables");
    EXPECT_EQ(tables[0].columns(), (std::vector<std::string>{"L", "tau", "site", "axis", "value"}));
    EXPECT_EQ(tables[1].columns(), (std::vector<std::string>{"L", "tau", "site_x", "site_y", "connected_ed", "connected_prediction"}));
    EXPECT_EQ(tables[2].columns(), (std::vector<std::string>{"L", "tau", "n", "region", "entropy"}));
    EXPECT_EQ(tables[3].columns(), (std::vector<std::string>{"L", "tau", "variance_ed", "variance_prediction"}));
    EXPECT_EQ(tables[4].columns(), (std::vector<std::string>{"L", "tau", "region_a", "region_b", "mi"}));
    EXPECT_EQ(tables[0].rows().size(), 10u);
    EXPECT_EQ(tables[2].rows().size(), 20u);

    // tau = 0 rows: Neel values (site 3 is up), no correlations, no entanglement
    EXPECT_NEAR(tables[0].number(0, "value"), 0.5, 1e-12);
    EXPECT_NEAR(tables[1].number(0, "connected_ed"), 0.0, 1e-12);
    EXPECT_NEAR(tables[1].number(0, "connected_prediction"), 0.0, 1e-12);
    EXPECT_NEAR(tables[2].number(0, "entropy"), 0.0, 1e-12);
    // open chain: (L-1)/16 + 0.36 L at L = 6
    EXPECT_NEAR(tables[3].number(0, "variance_ed"), 5.0 / 16 + 0.36 * 6, 1e-10);
    for(const auto& t : tables) EXPECT_EQ(t.metadata.at("config_hash"), parse_config(kScenario).hash());
}

TEST(Scenario, RowsOrderedCanonically) {
    const auto serial   = compute_scenario(parse_config(kScenario), 1);
    const auto parallel = compute_scenario(parse_config(kScenario), 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for(std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].to_csv(), parallel[i].to_csv());
    const auto& obs = serial[0];
    for(std::size_t r = 1; r < obs.rows().size(); ++r) {
        const bool ordered = obs.number(r - 1, "L") < obs.number(r, "L") ||
                             (obs.number(r - 1, "L") == obs.number(r, "L") && obs.number(r - 1, "tau") < obs.number(r, "tau"));
        EXPECT_TRUE(ordered) << r;
    }
}

TEST(Scenario, EmptyMeasurementsWritesManifestOnly) {
    TempDir    d("efqs_scenario_empty");
    RunOptions o;
    o.output_dir   = d.path;
    const auto rep = run_scenario(parse_config("[model]\nL = 4\n"), o);
    EXPECT_TRUE(rep.files.empty());
    EXPECT_TRUE(std::filesystem::exists(d.path / "manifest.json"));
}

TEST(Scenario, DeterministicAndGuarded) {
    TempDir    a("efqs_scenario_a"), b("efqs_scenario_b");
    const auto cfg = parse_config(kScenario);
    RunOptions oa, ob;
    oa.output_dir = a.path;
    ob.output_dir = b.path;
    ob.workers    = 3;
    const auto ra = run_scenario(cfg, oa);
    const auto rb = run_scenario(cfg, ob);
    ASSERT_EQ(ra.files.size(), 5u);
    for(std::size_t i = 0; i < ra.files.size(); ++i) EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i]));

    const auto manifest = nlohmann::json::parse(slurp(a.path / "manifest.json"));
    EXPECT_EQ(manifest["config_hash"], cfg.hash());
    EXPECT_EQ(manifest["version"], kVersion);
    EXPECT_EQ(manifest["files"].size(), 5u);

    // same config may rerun; a different one needs --force
    EXPECT_NO_THROW(run_scenario(cfg, oa));
    std::string other = kScenario;
    other.replace(other.find("hz = 0.8"), 8, "hz = 0.5");
    const auto cfg2 = parse_config(other);
    EXPECT_THROW(run_scenario(cfg2, oa), ConfigError);
    oa.force = true;
    EXPECT_NO_THROW(run_scenario(cfg2, oa));
    EXPECT_EQ(nlohmann::json::parse(slurp(a.path / "manifest.json"))["config_hash"], cfg2.hash());
}

TEST(Scenario, CapacityErrorsSurface) {
    EXPECT_THROW(compute_scenario(parse_config("[model]\nL = 15\n[measurements]\nvariance = true\n")), CapacityError);
}

TEST(Scenario, YplusUsesTwoSidedSeries) {
    const auto c = parse_config("[model]\nhx = 1.2\nhz = 0.8\nL = 6\n[state]\npattern = yplus\n[filter]\ntau_stop = 1\ntau_steps = 3\n"
                                "[measurements]\ncorrelators = 1,L\nobservables = y@3\n");
    const auto t = compute_scenario(c);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t[0].number(0, "value"), 0.5, 1e-12);
    EXPECT_NEAR(t[1].number(0, "connected_prediction"), 0.0, 1e-12);
}
