#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tangency/cli.hpp"

using namespace tangency;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("tangency_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TANGENCY_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.5625), "0.5625");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, DefaultsAndOverrides) {
  const fs::path d = scratch_dir("cfg");
  const fs::path file = d / "c.json";
  std::ofstream(file) << R"({"constants": {"alpha": 0.7}, "mu": [0.01, 0, 0, 0], "direction": 3, "k_max": 12})";
  RunConfig c = load_config(file.string(), nlohmann::json::object());
  EXPECT_EQ(c.params.alpha, 0.7);
  EXPECT_EQ(c.params.a10, 0.2);
  EXPECT_EQ(c.params.mu[0], 0.01);
  EXPECT_EQ(*c.direction, 3);

  c = load_config(file.string(), {{"constants", {{"alpha", 0.9}}}, {"k_max", 14}});
  EXPECT_EQ(c.params.alpha, 0.9);
  EXPECT_EQ(*c.k_max, 14);

  c = load_config(file.string(), {{"v", {1.0, 0.0, 1.0, 0.0}}});
  EXPECT_FALSE(c.direction.has_value());
  EXPECT_EQ(c.ray().scaling, ScalingCase::GeneralTransverse);
}

TEST(Config, Rejections) {
  EXPECT_THROW(RunConfig::from_json({{"bogus", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"constants", {{"beta", 1}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"k_max", "many"}}), ConfigError);
  EXPECT_THROW(load_config(std::nullopt, {{"k_max", 31}}), ConfigError);
  EXPECT_NO_THROW(load_config(std::nullopt, {{"k_max", 31}, {"allow_large_k", true}}));
  EXPECT_THROW(load_config(std::nullopt, {{"constants", {{"alpha", 1.5}}}}), ConfigError);
  EXPECT_THROW(load_config(std::nullopt, {{"direction", 2}, {"v", {1, 0, 0, 0}}}), ConfigError);
  EXPECT_THROW(load_config(std::nullopt, {{"v", {0, 0, 0, 0}}}), ConfigError);
  EXPECT_THROW(load_config(std::string("/nonexistent/x.json"), nlohmann::json::object()), ConfigError);
}

TEST(Csv, HeaderEchoesConfig) {
  RunConfig cfg;
  cfg.k_max = 9;
  CsvTable t({"a", "b"});
  t.add_note("hello");
  t.add_row({"1", format_double(0.25)});
  std::ostringstream out;
  t.write(out, cfg);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# config: {", 0), 0u);
  EXPECT_NE(s.find("\"k_max\":9"), std::string::npos);
  EXPECT_NE(s.find("# hello\na,b\n1,0.25\n"), std::string::npos);
}

TEST(Commands, PortraitReportsMissingOrbits) {
  RunConfig cfg;
  cfg.k_max = 6;
  cfg.out_dir = scratch_dir("portrait").string();
  std::ostringstream log;
  EXPECT_EQ(cmd_portrait(cfg, log), kExitOk);
  const fs::path csv = fs::path(cfg.out_dir) / "portrait.csv";
  const std::string text = slurp(csv);
  EXPECT_NE(text.find("# missing k=1"), std::string::npos);
  EXPECT_NE(text.find("# missing k=4"), std::string::npos);
  EXPECT_NE(log.str().find("k=3"), std::string::npos);
  EXPECT_NE(text.find("\norbit_5,0,"), std::string::npos);
  EXPECT_NE(text.find("\norbit_6,6,"), std::string::npos);
  EXPECT_EQ(text.find("\norbit_4,"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "plot_portrait.py"));
  const auto lines = data_lines(csv);
  EXPECT_EQ(lines.front(), "entity,index,x,y");
}

TEST(Commands, SweepIsReproducible) {
  RunConfig cfg;
  cfg.k_min = 10;
  cfg.k_max = 14;
  cfg.direction = 2;
  cfg.plot_script = false;
  cfg.out_dir = scratch_dir("sweep_a").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep(cfg, log), kExitOk);
  const std::string first = slurp(fs::path(cfg.out_dir) / "bifurcations.csv");
  cfg.out_dir = scratch_dir("sweep_b").string();
  cfg.jobs = 3;
  ASSERT_EQ(cmd_sweep(cfg, log), kExitOk);
  EXPECT_EQ(first, slurp(fs::path(cfg.out_dir) / "bifurcations.csv"));
  const auto lines = data_lines(fs::path(cfg.out_dir) / "bifurcations.csv");
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], "case,kind,k,epsilon,scaled_value,rate,predicted_limit,g,single_round,status");
  EXPECT_NE(lines[1].find(",alpha^k/k,"), std::string::npos);
  EXPECT_NE(lines[1].find("0.45"), std::string::npos);
  EXPECT_FALSE(fs::exists(fs::path(cfg.out_dir) / "plot_sweep.py"));
}

TEST(Commands, PredictRates) {
  RunConfig cfg;
  cfg.k_min = 8;
  cfg.k_max = 9;
  cfg.direction = 4;
  cfg.out_dir = scratch_dir("predict").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_predict(cfg, log), kExitOk);
  const auto lines = data_lines(fs::path(cfg.out_dir) / "predictions.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].rfind("case4,8,1/k,0.5625", 0), 0u) << lines[1];
}

TEST(Binary, ExitCodes) {
  const fs::path d = scratch_dir("bin");
  const std::string out = " --out " + d.string() + " --no-plot";
  EXPECT_EQ(run_cli("predict --direction 1" + out), 0);
  EXPECT_EQ(run_cli("predict --alpha 1.5" + out), 2);
  EXPECT_EQ(run_cli("sweep --k-max 40" + out), 2);
  EXPECT_EQ(run_cli("sweep --direction 1 --v 1,0,0,0" + out), 2);
  EXPECT_EQ(run_cli("portrait --k-max 5" + out), 0);
  EXPECT_EQ(run_cli("verify --k-max 6" + out), 1);
  EXPECT_NE(run_cli("nosuchcommand"), 0);
}

TEST(Binary, VerifyDefaultsPass) {
  const fs::path d = scratch_dir("verify");
  EXPECT_EQ(run_cli("verify --out " + d.string()), 0);
  const auto report = nlohmann::json::parse(slurp(d / "verify_report.json"));
  EXPECT_TRUE(report.at("all_pass").get<bool>());
  EXPECT_GE(report.at("checks").size(), 20u);
}
