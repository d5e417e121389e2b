#include "ncbm/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace ncbm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ncbm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

double last_value(const std::string& line) { return std::stod(line.substr(line.rfind(',') + 1)); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ncbm_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  const auto r = run({"density", "--name", "nosuch", "--t", "1", "--y", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nosuch"), std::string::npos);
}

TEST(Cli, DensityExamples) {
  auto r = run({"density", "--name", "survival", "--t", "1", "--x", "0,2", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "x1,x2,value");
  EXPECT_NEAR(last_value(lines[1]), std::erf(1.0), 1e-14);

  r = run({"density", "--name", "f", "--t", "1", "--x", "0,2", "--y", "0,2", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(last_value(data_lines(r.out)[1]), 0.156240, 5e-7);

  r = run({"density", "--name", "p", "--t", "1", "--y", "-1,1", "--y", "0,0.5", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_NEAR(last_value(lines[1]), 0.2341993, 1e-7);

  r = run({"density", "--name", "gue", "--t", "1", "--y", "0", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(last_value(data_lines(r.out)[1]), 0.3989422804, 1e-9);
  r = run({"density", "--name", "gue", "--n", "1", "--t", "1", "--x", "0", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_lines(r.out)[0], "x1,value");
  EXPECT_NEAR(last_value(data_lines(r.out)[1]), 0.3989422804, 1e-9);
  EXPECT_EQ(run({"density", "--name", "goe", "--t", "1", "--x", "0", "--y", "0"}).code, 2);
}

TEST(Cli, DensityEchoesConfigAndSeed) {
  const auto r = run({"density", "--name", "gue", "--t", "1", "--y", "0", "--seed", "42"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# config "), std::string::npos);
  EXPECT_NE(r.out.find("\"seed\":42"), std::string::npos);
  EXPECT_NE(r.out.find("# digest "), std::string::npos);
}

TEST(Cli, SurvivalMonteCarloReportsError) {
  const auto r = run({"density", "--name", "survival", "--t", "1", "--x", "0,2", "--method", "mc", "--mc-paths",
                      "20000", "--mc-steps", "64", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  EXPECT_EQ(lines[0], "x1,x2,value,error");
  const auto& row = lines[1];
  const auto c2 = row.rfind(',');
  const auto c1 = row.rfind(',', c2 - 1);
  const double value = std::stod(row.substr(c1 + 1, c2 - c1 - 1));
  const double se = std::stod(row.substr(c2 + 1));
  EXPECT_GT(se, 0.0);
  EXPECT_LT(std::abs(value - std::erf(1.0)), 3.0 * se);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
  for (const auto& p : {a, b}) {
    const auto r = run({"simulate", "--model", "noncolliding", "--n", "3", "--steps", "64", "--seed", "5", "--out",
                        p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(a), slurp(b));
  ASSERT_EQ(run({"simulate", "--model", "noncolliding", "--n", "3", "--steps", "64", "--seed", "6", "--out",
                 c.string()}).code,
            0);
  EXPECT_NE(slurp(a), slurp(c));
  const auto lines = data_lines(slurp(a));
  EXPECT_EQ(lines[0], "time,x1,x2,x3");
  EXPECT_EQ(lines.size(), 66u);
}

TEST(Cli, SimulateReplicatesNeedOut) {
  EXPECT_EQ(run({"simulate", "--model", "dyson", "--reps", "2", "--seed", "1"}).code, 2);
  const auto base = scratch("rep.csv");
  const auto r = run({"simulate", "--model", "dyson", "--n", "2", "--steps", "16", "--reps", "2", "--seed", "1",
                      "--out", base.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(scratch("rep_0.csv")));
  EXPECT_TRUE(fs::exists(scratch("rep_1.csv")));
  EXPECT_NE(slurp(scratch("rep_0.csv")), slurp(scratch("rep_1.csv")));
}

TEST(Cli, XiTEndsReal) {
  const auto p = scratch("xit.csv");
  const auto r = run({"simulate", "--model", "xit", "--n", "2", "--steps", "32", "--seed", "7", "--out", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(slurp(p));
  std::vector<std::string> header, last;
  std::istringstream h(lines.front()), l(lines.back());
  for (std::string f; std::getline(h, f, ',');) header.push_back(f);
  for (std::string f; std::getline(l, f, ',');) last.push_back(f);
  ASSERT_EQ(header.size(), last.size());
  EXPECT_EQ(header[0], "time");
  EXPECT_DOUBLE_EQ(std::stod(last[0]), 1.0);
  int imag = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind("im_", 0) == 0) {
      ++imag;
      EXPECT_EQ(std::stod(last[i]), 0.0) << header[i];
    }
  }
  EXPECT_EQ(imag, 4);
}

TEST(Cli, OneParticleVarianceLine) {
  const auto p = scratch("bm.csv");
  const auto r = run({"simulate", "--model", "dyson", "--n", "1", "--steps", "4096", "--seed", "8", "--out",
                      p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string key = "increment variance / dt = ";
  const auto at = r.out.find(key);
  ASSERT_NE(at, std::string::npos) << r.out;
  const double v = std::stod(r.out.substr(at + key.size()));
  EXPECT_NEAR(v, 1.0, 0.1);
}

TEST(Cli, ConfigFileAndPrecedence) {
  const auto cfg = scratch("run.toml");
  {
    std::ofstream f(cfg);
    f << "name = \"gue\"\nt = 4\ny = \"0\"\nseed = 9\n";
  }
  auto r = run({"density", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const double at4 = last_value(data_lines(r.out)[1]);
  EXPECT_NEAR(at4, 1.0 / std::sqrt(2.0 * 3.141592653589793 * 4.0), 1e-12);
  r = run({"density", "--config", cfg.string(), "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(last_value(data_lines(r.out)[1]), 0.3989422804, 1e-9);
}

TEST(Cli, VerifySuites) {
  const auto p = scratch("hc.json");
  auto r = run({"verify", "hc", "--n", "1", "--seed", "1", "--out", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(p));
  EXPECT_EQ(j["schema_version"], "1.0");
  EXPECT_EQ(j["command"], "verify hc");
  EXPECT_EQ(j["seed"], 1);
  EXPECT_TRUE(j["green"].get<bool>());
  ASSERT_EQ(j["runs"].size(), 1u);

  r = run({"verify", "imhof", "--n", "1", "--reps", "200", "--steps", "32", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["green"].get<bool>());
}

TEST(Cli, VerifyRejectsOffGridTimes) {
  const auto r = run({"verify", "theorem22", "--n", "2", "--steps", "64", "--times", "0.1", "--reps", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("multiple of the step"), std::string::npos) << r.err;
}

TEST(Cli, ConfigFileErrors) {
  const auto cfg = scratch("bad.toml");
  {
    std::ofstream f(cfg);
    f << "name = \"gue\"\nbogus = 1\n";
  }
  const auto r = run({"density", "--config", cfg.string(), "--y", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos) << r.err;
  EXPECT_EQ(run({"density", "--config", scratch("missing.toml").string()}).code, 2);
  EXPECT_EQ(run({"density", "--t", "1", "--y", "0"}).code, 2);
}

TEST(Cli, VerifyConfigFile) {
  const auto cfg = scratch("verify.toml");
  {
    std::ofstream f(cfg);
    f << "n = 1\nsamples = 10\nsigmas = \"0.5,1\"\nno_retry = true\nseed = 4\n";
  }
  const auto r = run({"verify", "hc", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["seed"], 4);
  EXPECT_EQ(j["config"]["n"], 1);
}
