#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("invaria_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("INVARIA_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const json& j, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "invaria");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = invaria::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  static json paper() {
    json j = invaria::cli::paper_config_json();
    j.erase("experiment");
    return j;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EquilibriaTable) {
  const auto cfg = write_config(paper());
  const Result r = run({"equilibria", "--config", cfg.string(), "--out", (dir_ / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("-0.352±2.549i"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("stable-spiral"), std::string::npos);
  EXPECT_NE(r.out.find("saddle"), std::string::npos);
  const json rep = json::parse(slurp(dir_ / "o" / "equilibria.json"));
  EXPECT_NEAR(rep["e2"]["point"][1].get<double>(), 4.012, 1e-3);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "manifest.json"));
}

TEST_F(CliTest, EquilibriaBVariant) {
  json j = paper();
  j["params"]["b"] = 0.6;
  const Result r = run({"equilibria", "--config", write_config(j).string(), "--out",
                        (dir_ / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(slurp(dir_ / "o" / "equilibria.json"));
  EXPECT_NEAR(rep["e2"]["eigenvalues"][0]["re"].get<double>(), -0.701, 1e-3);
  EXPECT_NEAR(rep["e2"]["eigenvalues"][0]["im"].get<double>(), 3.568, 1e-3);
  EXPECT_NE(r.out.find("±3.568i"), std::string::npos) << r.out;
}

TEST_F(CliTest, LEqualOneIsAConfigError) {
  json j = paper();
  j["params"]["l"] = 1.0;
  const Result r = run({"equilibria", "--config", write_config(j).string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("z2 singular at l=1"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrors) {
  json unknown = paper();
  unknown["integrator"]["stepsize"] = 0.1;
  EXPECT_EQ(run({"simulate", "--config", write_config(unknown).string()}).code, 1);

  json zero = paper();
  zero["integrator"]["t_end"] = 0;
  const Result r = run({"simulate", "--config", write_config(zero).string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("t_end"), std::string::npos);

  json long_run = paper();
  long_run["integrator"]["t_end"] = 500;
  EXPECT_EQ(run({"simulate", "--config", write_config(long_run).string()}).code, 1);

  json bad_model = paper();
  bad_model["model"] = "extended3";
  EXPECT_EQ(run({"simulate", "--config", write_config(bad_model).string()}).code, 1);

  EXPECT_EQ(run({"simulate"}).code, 1);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "missing.json").string()}).code, 1);
  std::ofstream(dir_ / "broken.json") << "{ \"model\": ";
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "broken.json").string()}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
}

TEST_F(CliTest, NothingIsWrittenOnConfigError) {
  json j = paper();
  j["params"]["c"] = -1;
  j["output_dir"] = (dir_ / "never").string();
  EXPECT_EQ(run({"simulate", "--config", write_config(j).string()}).code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "never"));
}

TEST_F(CliTest, SimulatePaperRowCount) {
  const auto cfg = write_config(paper());
  const Result r = run({"simulate", "--config", cfg.string(), "--out", (dir_ / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "o" / "trajectory.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,r,d,y,z");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4001u);
}

TEST_F(CliTest, SimulateIsDeterministicAndLeavesConfigAlone) {
  const auto cfg = write_config(paper());
  const std::string before = slurp(cfg);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--seed", "5"}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--seed", "5"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "manifest.json"), slurp(dir_ / "b" / "manifest.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "b" / "trajectory.csv"));
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "6"}).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "c" / "trajectory.csv"));
  EXPECT_EQ(slurp(cfg), before);
}

TEST_F(CliTest, SeedPrecedence) {
  json j = paper();
  j["seed"] = 3;
  const auto cfg = write_config(j);
  auto seed_in = [&](const std::string& sub) {
    return json::parse(slurp(dir_ / sub / "manifest.json"))["config"]["seed"].get<std::uint64_t>();
  };
  ASSERT_EQ(run({"equilibria", "--config", cfg.string(), "--out", (dir_ / "a").string()}).code, 0);
  EXPECT_EQ(seed_in("a"), 3u);
  setenv("INVARIA_SEED", "11", 1);
  ASSERT_EQ(run({"equilibria", "--config", cfg.string(), "--out", (dir_ / "b").string()}).code, 0);
  EXPECT_EQ(seed_in("b"), 11u);
  ASSERT_EQ(run({"equilibria", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "12"}).code, 0);
  EXPECT_EQ(seed_in("c"), 12u);
  setenv("INVARIA_SEED", "abc", 1);
  EXPECT_EQ(run({"equilibria", "--config", cfg.string(), "--out", (dir_ / "d").string()}).code, 1);
  unsetenv("INVARIA_SEED");
}

TEST_F(CliTest, DivergenceExitsTwo) {
  const json j{{"model", "custom"},
               {"custom", {{"dim", 1}, {"rhs", {"k*x1*x1"}}}},
               {"params", {{"k", 1.0}}},
               {"initial_state", {1.0}},
               {"integrator", {{"h", 0.01}, {"t_end", 5.0}, {"decimate", 1}}}};
  const Result r = run({"simulate", "--config", write_config(j).string(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("numeric"), std::string::npos);
}

TEST_F(CliTest, CustomAndBuiltinModels) {
  const json custom{{"model", "custom"},
                    {"custom", {{"dim", 1}, {"rhs", {"-x1"}}}},
                    {"initial_state", {1.0}},
                    {"integrator", {{"h", 0.01}, {"t_end", 1.0}, {"decimate", 100}}}};
  ASSERT_EQ(run({"simulate", "--config", write_config(custom).string(), "--out", (dir_ / "c").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "c" / "trajectory.csv").substr(0, 4), "t,x1");

  const json orig{{"model", "original3"},
                  {"params", {{"u0", 1.0}, {"s", 1.0}, {"p", 1.0}, {"y0", 1.0}}},
                  {"inputs", {{"u", {{"segments", {{{"t_start", 0}, {"t_end", 10}, {"base", 0.5}}}}}}}},
                  {"initial_state", {1.0, 1.0, 1.0}},
                  {"integrator", {{"h", 0.01}, {"t_end", 10.0}, {"decimate", 10}}}};
  ASSERT_EQ(run({"simulate", "--config", write_config(orig).string(), "--out", (dir_ / "o").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "o" / "trajectory.csv").substr(0, 9), "t,u,y,x,z");

  json missing_state = orig;
  missing_state.erase("initial_state");
  EXPECT_EQ(run({"simulate", "--config", write_config(missing_state).string()}).code, 1);
  json bad_rhs = custom;
  bad_rhs["custom"]["rhs"] = {"-x1*q"};
  EXPECT_EQ(run({"simulate", "--config", write_config(bad_rhs).string()}).code, 1);
  EXPECT_EQ(run({"equilibria", "--config", write_config(orig).string()}).code, 1);
}

TEST_F(CliTest, PhaseFourVariants) {
  json j = invaria::cli::paper_config_json();
  j["experiment"]["phase"]["grid"] = {{"y", {{"lo", -2}, {"hi", 20}, {"count", 12}}},
                                      {"z", {{"lo", 0}, {"hi", 10}, {"count", 6}}}};
  j["experiment"]["phase"]["t_max"] = 100;
  const Result r = run({"phase", "--config", write_config(j).string(), "--out", (dir_ / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* v : {"baseline", "s1.5", "b0.6", "c4"}) {
    for (const std::string f : {"field_", "basin_", "equilibria_"}) {
      const std::string ext = f == "equilibria_" ? ".json" : ".csv";
      EXPECT_TRUE(fs::exists(dir_ / "o" / (f + v + ext))) << f << v;
    }
    EXPECT_TRUE(fs::exists(dir_ / "o" / (std::string("phase_") + v + ".svg")));
  }
  const json s15 = json::parse(slurp(dir_ / "o" / "equilibria_s1.5.json"));
  EXPECT_NEAR(s15["e2"]["point"][1].get<double>(), 0.669, 1e-3);
  EXPECT_EQ(slurp(dir_ / "o" / "field_baseline.csv").substr(0, 10), "y,z,dy,dz\n");
}

TEST_F(CliTest, PhaseGridThroughE2HasZeroVector) {
  json j = paper();
  j["experiment"] = {{"phase", {{"grid", {{"y", {{"lo", 11}, {"hi", 11}, {"count", 1}}},
                                          {"z", {{"lo", 0.0}, {"hi", 1.0}, {"count", 2}}}}},
                                {"t_max", 10},
                                {"svg", false}}}};
  const double z2 = (0.01 + 0.3 * 11) / (0.25 * 11 * 0.3);
  j["experiment"]["phase"]["grid"]["z"]["hi"] = z2;
  ASSERT_EQ(run({"phase", "--config", write_config(j).string(), "--out", (dir_ / "o").string()}).code, 0);
  std::ifstream in(dir_ / "o" / "field_baseline.csv");
  std::string header, first, at_e2;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, at_e2);
  std::stringstream ss(at_e2);
  std::string y, z, dy, dz;
  std::getline(ss, y, ',');
  std::getline(ss, z, ',');
  std::getline(ss, dy, ',');
  std::getline(ss, dz, ',');
  EXPECT_NEAR(std::stod(dy), 0.0, 1e-12);
  EXPECT_EQ(std::stod(dz), 0.0);
  EXPECT_FALSE(fs::exists(dir_ / "o" / "phase_baseline.svg"));
}

TEST_F(CliTest, InvarianceVerdicts) {
  const auto cfg = write_config(invaria::cli::paper_config_json());
  const Result r = run({"invariance", "--config", cfg.string(), "--out", (dir_ / "o").string(), "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto verdict = [&](const char* p) { return json::parse(slurp(dir_ / "o" / (std::string("verdict_") + p + ".json"))); };
  EXPECT_EQ(verdict("s")["decision"], "invariant");
  EXPECT_EQ(verdict("b")["decision"], "not-invariant");
  EXPECT_EQ(verdict("c")["decision"], "not-invariant");
  EXPECT_LT(verdict("s")["max_condition_residual"].get<double>(), 1e-6);
  EXPECT_EQ(verdict("s")["seed"], 1);
  for (const char* k : {"param", "from", "to", "max_condition_residual", "max_output_residual",
                        "decision", "thresholds", "seed"}) {
    EXPECT_TRUE(verdict("b").contains(k)) << k;
  }
  EXPECT_EQ(slurp(dir_ / "o" / "residual_s.csv").substr(0, 23), "t,y_from,y_to,residual\n");
}

TEST_F(CliTest, UndecidedBandExitsTwo) {
  json j = invaria::cli::paper_config_json();
  j["experiment"]["invariance"]["tests"] = {{{"param", "b"}, {"from", 0.3}, {"to", 0.6}}};
  j["experiment"]["invariance"]["thresholds"] = {{"invariant", 1e-5}, {"not_invariant", 1e6}};
  const Result r = run({"invariance", "--config", write_config(j).string(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("undecided"), std::string::npos) << r.err;
}

TEST_F(CliTest, CustomCandidate) {
  json j = invaria::cli::paper_config_json();
  j["experiment"]["invariance"]["tests"] = json::array();
  j["experiment"]["invariance"]["candidates"] = {
      {{"param", "s"}, {"from", 1}, {"to", 2}, {"alpha", "x1/s"}, {"beta", "x2"}, {"singular", "l*r - x2"}}};
  ASSERT_EQ(run({"invariance", "--config", write_config(j).string(), "--out", (dir_ / "o").string()}).code, 0);
  const json c = json::parse(slurp(dir_ / "o" / "conditions.json"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_LT(c[0]["max"][0].get<double>(), 1e-6);

  j["experiment"]["invariance"]["candidates"][0]["beta"] = "x1";
  EXPECT_EQ(run({"invariance", "--config", write_config(j).string()}).code, 1);
}

TEST_F(CliTest, DcCheck) {
  const auto cfg = write_config(invaria::cli::paper_config_json());
  ASSERT_EQ(run({"dc-check", "--config", cfg.string(), "--out", (dir_ / "o").string()}).code, 0);
  const json d = json::parse(slurp(dir_ / "o" / "dc_check.json"));
  ASSERT_EQ(d["checks"].size(), 3u);
  EXPECT_LT(d["checks"][0]["max_discrepancy"].get<double>(), 1e-8);
  EXPECT_GT(d["checks"][1]["max_discrepancy"].get<double>(), 1e-2);
  EXPECT_GT(d["checks"][2]["max_discrepancy"].get<double>(), 1e-2);
}

TEST(PaperComparisons, AllWithinTolerance) {
  for (const auto& v : invaria::cli::paper_comparisons(invaria::ExtendedParams::paper())) {
    EXPECT_LE(std::abs(v.computed - v.expected), invaria::cli::kPaperTolerance) << v.name;
  }
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(invaria::cli::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ShippedConfigs, AllValidateExceptTheSingularOne) {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(INVARIA_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++n;
    if (entry.path().stem() == "singular_l") {
      EXPECT_THROW(invaria::cli::load_config(entry.path()), invaria::cli::ConfigError);
    } else {
      EXPECT_NO_THROW(invaria::cli::load_config(entry.path())) << entry.path();
    }
  }
  EXPECT_GE(n, 5u);
}
