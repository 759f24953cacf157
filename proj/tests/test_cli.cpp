#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <openssl/evp.h>

#include "kvn/config.hpp"
#include "kvn/error.hpp"
#include "kvn/propagator.hpp"
#include "kvn/units.hpp"

using namespace kvn;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kvn_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

Result run_cli(const std::string& args, const fs::path& dir) {
  const auto log = dir / "log.txt";
  const std::string cmd = std::string(KVN_MD_BINARY) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(log)};
}

ParsedConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

const std::string kBiasCfg = std::string(KVN_SOURCE_DIR) + "/configs/bias_check.cfg";

}  // namespace

TEST(ConfigParse, SectionsPrefixKeys) {
  const auto p = parse("mode = relax\n# comment\n[grid]\nn_R = 5  # trailing\n");
  ASSERT_EQ(p.entries.count("grid.n_R"), 1u);
  EXPECT_EQ(p.entries.at("grid.n_R").value, "5");
  EXPECT_EQ(p.entries.at("grid.n_R").line, 4);
}

TEST(ConfigParse, DuplicatesAndMalformedLinesAreCollected) {
  try {
    parse("a = 1\na = 2\nthis line is broken\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("line 2"), std::string::npos) << m;
    EXPECT_NE(m.find("line 3"), std::string::npos) << m;
  }
}

TEST(ConfigValidate, MissingTablePathNamesKey) {
  try {
    validate(parse("mode = relax\n[pes]\nkind = pauli_table\n"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("pes.path"), std::string::npos) << e.what();
  }
}

TEST(ConfigValidate, UnknownKeyReportsLine) {
  try {
    validate(parse("mode = bias-check\n[langevin]\ngama = 0.1\n"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("langevin.gama (line 3): unknown key"), std::string::npos) << e.what();
  }
}

TEST(ConfigValidate, AllErrorsReportedTogether) {
  try {
    validate(parse("mode = relax\n[grid]\nn_R = 0\nR_min_angstrom = 3\nR_max_angstrom = 1\n[langevin]\ndt = -1\nbogus = 1\n"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("grid.n_R"), std::string::npos) << m;
    EXPECT_NE(m.find("langevin.dt"), std::string::npos) << m;
    EXPECT_NE(m.find("langevin.bogus"), std::string::npos) << m;
    EXPECT_NE(m.find("pes.path"), std::string::npos) << m;
  }
}

TEST(ConfigValidate, MissingModeIsError) { EXPECT_THROW(validate(parse("seed = 3\n")), ConfigError); }

TEST(ConfigValidate, DerivedLangevinQuantities) {
  const auto c = validate(parse("mode = bias-check\n[langevin]\ngamma = 0.02\ndt = 0.5\nT_phys_kelvin = 947\n"));
  EXPECT_DOUBLE_EQ(c.gamma * c.dt, 0.01);
  const double tp = units::kelvin_to_hartree(947.0);
  EXPECT_NEAR(c.t_phys, tp, 1e-15);
  EXPECT_DOUBLE_EQ(c.t_int, corrected_internal_temperature(tp, 0.01));
  EXPECT_LT(c.t_int, c.t_phys);
  EXPECT_NEAR(c.sigma_h, std::sqrt(2 * c.mass * c.t_int * -std::expm1(-0.02)), 1e-12 * c.sigma_h);
}

TEST(ConfigValidate, CorrectionOffKeepsPhysicalTemperature) {
  const auto c = validate(parse("mode = bias-check\n[langevin]\ncorrection = off\n"));
  EXPECT_EQ(c.t_int, c.t_phys);
}

TEST(ConfigValidate, SurfaceOutsideRangeIsError) {
  EXPECT_THROW(validate(parse("mode = tst\n[pes]\nkind = morse\nmorse.De = 0.17\nmorse.alpha = 1\nmorse.Re = 1.4\n"
                              "[tst]\nR_dagger_angstrom = 9\n")),
               ConfigError);
}

TEST(Cli, MissingPesPathExitsWithConfigCode) {
  const auto dir = scratch("missing");
  write(dir / "bad.cfg", "mode = relax\n[pes]\nkind = pauli_table\n");
  const auto r = run_cli("--config " + (dir / "bad.cfg").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("pes.path"), std::string::npos) << r.output;
}

TEST(Cli, UnknownKeyExitsWithConfigCode) {
  const auto dir = scratch("unknown");
  write(dir / "bad.cfg", "mode = bias-check\nfoo = 1\n");
  const auto r = run_cli("--config " + (dir / "bad.cfg").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("foo (line 2): unknown key"), std::string::npos) << r.output;
}

TEST(Cli, MissingConfigFlagExitsWithConfigCode) {
  const auto dir = scratch("noflag");
  EXPECT_EQ(run_cli("", dir).code, 2);
  EXPECT_EQ(run_cli("--help", dir).code, 0);
}

TEST(Cli, BiasCheckRunIsReproducibleAndHashed) {
  const auto dir = scratch("bias");
  const auto a = run_cli("--config " + kBiasCfg + " --out " + (dir / "a").string(), dir);
  ASSERT_EQ(a.code, 0) << a.output;
  EXPECT_NE(a.output.find("PASS"), std::string::npos) << a.output;
  EXPECT_EQ(a.output.find("FAIL"), std::string::npos) << a.output;
  const auto b = run_cli("--config " + kBiasCfg + " --out " + (dir / "b").string(), dir);
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_EQ(slurp(dir / "a" / "bias.csv"), slurp(dir / "b" / "bias.csv"));

  const auto man = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(man["exit_code"], 0);
  EXPECT_TRUE(man.contains("versions"));
  EXPECT_NEAR(man["config"]["langevin"]["s"].get<double>(), 0.01, 1e-15);
  ASSERT_FALSE(man["outputs"].empty());
  for (const auto& o : man["outputs"]) {
    const std::string data = slurp(dir / "a" / o["file"].get<std::string>());
    EXPECT_EQ(o["bytes"].get<std::size_t>(), data.size());
    EXPECT_EQ(o["sha256"].get<std::string>(), sha256_hex(data));
  }
}

TEST(Cli, ModeOverrideTakesPrecedence) {
  const auto dir = scratch("override");
  write(dir / "cfg.cfg", "mode = relax\n[pes]\nkind = pauli_table\n[bias]\ns_values = 0.01\n");
  const auto r = run_cli("--config " + (dir / "cfg.cfg").string() + " --mode bias-check --out " + (dir / "o").string(), dir);
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "o" / "bias.csv"));
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "o" / "manifest.json"))["config"]["mode"], "bias-check");
}
