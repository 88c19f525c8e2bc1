#include "membrane/cli.hpp"
#include "membrane/config.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace membrane;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("membrane_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Writes the config with output_dir redirected into dir and returns its path.
fs::path stage(const fs::path& dir, const std::string& file, const std::string& out) {
  auto j = nlohmann::json::parse(slurp(fs::path(MEMBRANE_CONFIG_DIR) / file));
  j["output_dir"] = (dir / out).string();
  const fs::path p = dir / file;
  std::ofstream(p) << j.dump(2);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MEMBRANE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, RoundTripIsStable) {
  for (const auto& entry : fs::directory_iterator(MEMBRANE_CONFIG_DIR)) {
    const RunConfig c = load_config(entry.path().string());
    const std::string text = serialize(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, c) << entry.path();
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, DefaultsAndSeedPropagation) {
  const RunConfig c = parse_config(R"({"seed": 7})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.minimizer.seed, 7u);
  EXPECT_EQ(c.verify.seed, 7u);
  EXPECT_EQ(c.model, IsotropicModel{});
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, HashTracksContent) {
  const RunConfig a = parse_config(R"({"seed": 1})");
  const RunConfig b = parse_config(R"({"seed": 2})");
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, UnknownKeyIsRejected) {
  for (const char* text : {R"({"sead": 1})", R"({"model": {"theta": {"c": 1.5, "s": 2}}})",
                           R"({"minimizer": {"max_iters": 10}})"}) {
    try {
      parse_config(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
      EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos) << e.what();
    }
  }
}

TEST(Config, InvalidValuesAreRejected) {
  for (const char* text :
       {R"({"model": {"theta": {"q": 1.0}}})", R"({"domain": {"resolution": -0.1}})",
        R"({"surface": {"kind": "cube"}})", R"({"minimizer": {"armijo_c": 2}})", R"({"seed": "x"})",
        R"({"domain": {"kind": "annulus", "inner_radius": 1.0, "outer_radius": 0.5}})",
        R"({"boundary_map": {"kind": "affine", "matrix": [[1, 0]]}})"}) {
    try {
      parse_config(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError) << text;
    }
  }
}

TEST(Config, SyntaxErrorReportsLine) {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"output_dir\": \"x\"\n  \"domain\": {}\n}\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 4:"), std::string::npos) << e.what();
  }
}

TEST(Output, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(fmt(0.1), "0.10000000000000001");
}

TEST(Cli, VerifyExitCodes) {
  const fs::path d = scratch_dir("verify");
  EXPECT_EQ(run_cli("verify " + stage(d, "verify_default.json", "ok").string()), exit_code::ok);
  EXPECT_EQ(run_cli("verify " + stage(d, "verify_weak_barrier.json", "weak").string()), exit_code::failed_check);
  const std::string csv = slurp(d / "ok" / "verify_summary.csv");
  EXPECT_EQ(csv.rfind("# config_hash ", 0), 0u);
  EXPECT_NE(csv.find("check_name,samples,worst_violation,passed\n"), std::string::npos);
  EXPECT_NE(slurp(d / "weak" / "verify_summary.csv").find("growth,10000,"), std::string::npos);
  EXPECT_NE(slurp(d / "ok" / "verify_report.txt").find("rank_one"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path d = scratch_dir("bad");
  std::ofstream(d / "broken.json") << "{ \"seed\": 1,, }";
  std::ofstream(d / "unknown.json") << R"({"colour": "red"})";
  EXPECT_EQ(run_cli("verify " + (d / "broken.json").string()), exit_code::config_error);
  EXPECT_EQ(run_cli("verify " + (d / "unknown.json").string()), exit_code::config_error);
  EXPECT_EQ(run_cli("verify " + (d / "missing.json").string()), exit_code::config_error);
  EXPECT_EQ(run_cli("frobnicate"), exit_code::config_error);
}

TEST(Cli, CollapsedStartExitsFour) {
  const fs::path d = scratch_dir("collapsed");
  EXPECT_EQ(run_cli("minimize " + stage(d, "plane_collapsed.json", "out").string()), exit_code::infeasible);
  EXPECT_NE(slurp(d / "out" / "summary.txt").find("infeasible_start"), std::string::npos);
}

TEST(Cli, MaxIterExitsThree) {
  const fs::path d = scratch_dir("maxiter");
  auto j = nlohmann::json::parse(slurp(fs::path(MEMBRANE_CONFIG_DIR) / "sphere_cap.json"));
  j["output_dir"] = (d / "out").string();
  j["minimizer"]["max_iter"] = 2;
  std::ofstream(d / "c.json") << j.dump();
  EXPECT_EQ(run_cli("minimize " + (d / "c.json").string()), exit_code::max_iter);
}

TEST(Cli, MinimizeOutputsAreReproducible) {
  const fs::path d = scratch_dir("repro");
  const fs::path cfg = stage(d, "sphere_cap.json", "a");
  auto j = nlohmann::json::parse(slurp(cfg));
  j["output_dir"] = (d / "b").string();
  std::ofstream(d / "b.json") << j.dump(2);
  ASSERT_EQ(run_cli("--threads 1 minimize " + cfg.string()), exit_code::ok);
  ASSERT_EQ(run_cli("--threads 4 minimize " + (d / "b.json").string()), exit_code::ok);
  for (const char* f : {"energy_history.csv", "deformed.obj"}) {
    const std::string a = slurp(d / "a" / f), b = slurp(d / "b" / f);
    EXPECT_FALSE(a.empty()) << f;
    // Only the header differs: output_dir is part of the hashed config.
    EXPECT_EQ(a.substr(a.find('\n')), b.substr(b.find('\n'))) << f;
  }
  EXPECT_NE(slurp(d / "a" / "summary.txt").find("status = converged"), std::string::npos);
}

TEST(Cli, DegreeAndResidualSubcommands) {
  const fs::path d = scratch_dir("sub");
  const fs::path cfg = stage(d, "plane_identity.json", "out");
  EXPECT_EQ(run_cli("degree " + cfg.string() + " --point 0.1 0.2 0"), exit_code::ok);
  const std::string deg = slurp(d / "out" / "degree.csv");
  EXPECT_NE(deg.find("\n0.10000000000000001,0.20000000000000001,0,1,"), std::string::npos) << deg;
  EXPECT_EQ(run_cli("residual " + cfg.string()), exit_code::ok);
  EXPECT_FALSE(slurp(d / "out" / "residual.csv").empty());
  EXPECT_EQ(run_cli("degree " + cfg.string() + " --point 0.1 0.2"), exit_code::config_error);
}
