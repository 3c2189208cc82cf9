#include "kmslab/cli/artifacts.hpp"
#include "kmslab/cli/commands.hpp"
#include "kmslab/error.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kmslab;
using namespace kmslab::cli;
namespace fs = std::filesystem;

namespace {

const char* kProblem = R"(
[problem]
N = 3
p = 2
r = 2
theta = 0.5
m = 1.3
)";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("kmslab_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& cmd, const std::string& toml, const std::string& label) {
    out_.str("");
    err_.str("");
    CommandOptions opts;
    opts.outdir = dir_.string();
    opts.label = label;
    return run_command(cmd, parse_run_config(toml), opts, out_, err_);
  }

  nlohmann::json json(const std::string& label, const std::string& file) {
    return nlohmann::json::parse(read_file(dir_ / label / file));
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

} // namespace

TEST(RunConfig, UnknownKeyRejected) {
  EXPECT_THROW(parse_run_config(std::string(kProblem) + "bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config(std::string(kProblem) + "[solve]\nkk = 3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[problem\nN = 3\n"), ConfigError);
}

TEST(RunConfig, EchoRoundTrips) {
  const auto cfg = parse_run_config(std::string("seed = 9\n") + kProblem + "[grid]\nd = 2\nn = 17\n");
  EXPECT_EQ(cfg.seed_or_default(), 9u);
  const auto echo = cfg.echo();
  EXPECT_EQ(echo["grid"]["d"], 2);
}

TEST_F(CliTest, MissingProblemIsConfigError) {
  EXPECT_EQ(run("solve", "[grid]\nd = 1\n", "x"), kExitConfig);
}

TEST_F(CliTest, ZonesExitCodes) {
  EXPECT_EQ(run("zones", "[problem]\nN = 3\np = 2\nr = 6\ntheta = 0.5\nm = 1.18\n", "ok"), kExitOk);
  EXPECT_NE(out_.str().find("U_SobolevRegularized"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "ok" / "zones.csv"));
  EXPECT_EQ(run("zones", "[problem]\nN = 3\np = 2\nr = 6\ntheta = 1.5\nm = 1.18\n", "bad"), kExitInadmissible);
  EXPECT_NE(out_.str().find("theta >= p-1"), std::string::npos);
}

TEST_F(CliTest, CheckNlDeterministic) {
  const std::string base = std::string("seed = 42\n") + kProblem + "[nonlinearity]\nsamples = 5000\n";
  EXPECT_EQ(run("check-nl", base + "kind = \"prototype\"\n", "proto"), kExitOk);
  EXPECT_EQ(run("check-nl", base + "kind = \"sign_violating\"\n", "sv1"), kExitHypothesis);
  EXPECT_EQ(run("check-nl", base + "kind = \"sign_violating\"\n", "sv2"), kExitHypothesis);
  EXPECT_EQ(read_file(dir_ / "sv1" / "report.json"), read_file(dir_ / "sv2" / "report.json"));
  EXPECT_FALSE(json("sv1", "report.json")["checks"][0]["witness"].is_null());
}

TEST_F(CliTest, SolveManifestDigests) {
  const std::string cfg = std::string(kProblem) +
                          "[nonlinearity]\nkind = \"prototype\"\n[grid]\nd = 1\nn = 65\n[datum]\nkind = \"constant\"\namplitude = 1.0\n"
                          "[solve]\nk = 10\nrelax = 0.5\n";
  ASSERT_EQ(run("solve", cfg, "fp"), kExitOk) << err_.str();
  const auto report = json("fp", "report.json");
  EXPECT_TRUE(report["result"]["converged"].get<bool>());
  EXPECT_EQ(report["exit_code"], 0);
  const auto manifest = json("fp", "manifest.json");
  EXPECT_EQ(manifest["exit_code"], 0);
  ASSERT_FALSE(manifest["files"].empty());
  for (const auto& f : manifest["files"]) {
    const auto path = dir_ / "fp" / f["path"].get<std::string>();
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_EQ(sha256_hex(read_file(path)), f["sha256"].get<std::string>());
  }
}

TEST_F(CliTest, SweepNeedsFourLambdas) {
  const std::string cfg = std::string(kProblem) +
                          "[nonlinearity]\nkind = \"prototype\"\n[grid]\nd = 1\nn = 33\n[datum]\nkind = \"constant\"\n[solve]\nk = 20\n"
                          "[sweep]\nlambda = [1, 2, 4]\n";
  EXPECT_EQ(run("sweep", cfg, "few"), kExitConfig);
}

TEST_F(CliTest, ContinuationCauchyDecreasing) {
  const std::string cfg = std::string(kProblem) +
                          "[nonlinearity]\nkind = \"prototype\"\n[grid]\nd = 1\nn = 129\n[datum]\nkind = \"constant\"\n[solve]\nk = 10\n"
                          "[sweep]\nk_schedule = [1, 4, 16, 64]\n";
  ASSERT_EQ(run("continuation", cfg, "cont"), kExitOk) << err_.str();
  std::istringstream csv(read_file(dir_ / "cont" / "cauchy.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<std::string> rows;
  while (std::getline(csv, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  EXPECT_EQ(rows.size(), 3u);
  const auto stages = json("cont", "report.json");
  EXPECT_EQ(stages["exit_code"], 0);
}

TEST_F(CliTest, RerunLeavesNoOrphans) {
  const std::string cfg = std::string(kProblem) +
                          "[nonlinearity]\nkind = \"prototype\"\n[grid]\nd = 1\nn = 33\n[datum]\nkind = \"constant\"\n[solve]\nk = 10\n";
  ASSERT_EQ(run("solve", cfg, "same"), kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "same" / "fields" / "u.csv"));
  ASSERT_EQ(run("zones", kProblem, "same"), kExitOk);
  EXPECT_FALSE(fs::exists(dir_ / "same" / "fields" / "u.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "same" / "history.csv"));
  const auto manifest = json("same", "manifest.json");
  for (const auto& entry : fs::recursive_directory_iterator(dir_ / "same")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir_ / "same").generic_string();
    if (rel == "manifest.json") continue;
    bool listed = false;
    for (const auto& f : manifest["files"]) listed |= f["path"] == rel;
    EXPECT_TRUE(listed) << rel;
  }
}

#ifdef KMSLAB_CLI_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const auto cfg = dir_ / "zones.toml";
  std::ofstream(cfg) << "[problem]\nN = 3\np = 2\nr = 6\ntheta = 1.5\nm = 1.18\n";
  const std::string bin = KMSLAB_CLI_PATH;
  auto code = [](const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(code(bin + " zones --config " + cfg.string() + " --outdir " + dir_.string()), 2);
  EXPECT_EQ(code(bin + " zones --config " + (dir_ / "missing.toml").string()), 1);
  EXPECT_EQ(code(bin + " nonsense"), 1);
}
#endif
