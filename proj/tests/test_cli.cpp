#include <apd/fourier.hpp>
#include <apd/io.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("apd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Runs the CLI, returning its exit status; stdout and stderr go to files.
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + APD_CLI_PATH + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream is(path(name), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  std::vector<json> records(const std::string& name = "stdout") const {
    std::vector<json> out;
    std::istringstream is(slurp(name));
    for (std::string line; std::getline(is, line);) out.push_back(json::parse(line));
    return out;
  }

  static json summary_of(const std::vector<json>& recs) {
    json found;
    int count = 0;
    for (const json& r : recs)
      if (r.at("type") == "summary") {
        found = r;
        ++count;
      }
    EXPECT_EQ(count, 1);
    return found;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PlanLowerPaperRegime) {
  ASSERT_EQ(run("plan --mode lower --p 3 --epsilon '2^-160*3^-8'"), 0) << slurp("stderr");
  const json s = summary_of(records());
  EXPECT_EQ(s.at("s"), 5);
  EXPECT_EQ(s.at("m1"), 54);
  EXPECT_TRUE(s.at("all_pass").get<bool>());
}

TEST_F(Cli, PlanUpperHeight) {
  ASSERT_EQ(run("plan --mode upper --p 3 --epsilon 0.1 --alpha 0.5"), 0) << slurp("stderr");
  EXPECT_EQ(summary_of(records()).at("height"), 7);
}

TEST_F(Cli, ScanConstantFunction) {
  apd::io::write_function_file(path("c.fpn"), apd::GFunction::constant(apd::Space(3, 3), 0.5), apd::io::Encoding::Text);
  ASSERT_EQ(run("scan --in " + path("c.fpn")), 0) << slurp("stderr");
  const auto recs = records();
  EXPECT_EQ(recs.size(), 28u);
  const json s = summary_of(recs);
  EXPECT_NEAR(s.at("lambda").get<double>(), 0.125, 1e-15);
  EXPECT_NEAR(s.at("margin").get<double>(), 0.0, 1e-15);
  EXPECT_EQ(recs[5].at("type"), "rho");
  EXPECT_EQ(recs[5].at("d"), 5);
}

TEST_F(Cli, ConstructThenVerify) {
  ASSERT_EQ(run("construct --p 3 --alpha 0.5 --eta 0.1 --dims 2,3 --mus 8/9 --seed 7 --out " + path("f.fpn")), 0)
      << slurp("stderr");
  const auto built = records();
  int properties = 0;
  for (const json& r : built)
    if (r.at("type") == "property") {
      ++properties;
      EXPECT_TRUE(r.at("pass").get<bool>()) << r.dump();
    }
  EXPECT_EQ(properties, 10);
  EXPECT_TRUE(summary_of(built).at("all_pass").get<bool>());
  EXPECT_TRUE(fs::exists(path("f.fpn.meta.json")));

  ASSERT_EQ(run("verify --in " + path("f.fpn")), 0) << slurp("stderr");
  const auto checked = records();
  EXPECT_EQ(summary_of(checked).at("profile"), "full");
  EXPECT_TRUE(summary_of(checked).at("all_pass").get<bool>());
}

TEST_F(Cli, VerifyWithoutMetadataChecksProfileFreeProperties) {
  ASSERT_EQ(run("construct --p 3 --alpha 0.5 --eta 0.1 --dims 2 --seed 1 --binary --out " + path("g.fpnb")), 0);
  fs::remove(path("g.fpnb.meta.json"));
  ASSERT_EQ(run("verify --in " + path("g.fpnb")), 0) << slurp("stderr");
  const auto recs = records();
  EXPECT_EQ(summary_of(recs).at("profile"), "none");
  EXPECT_TRUE(summary_of(recs).at("all_pass").get<bool>());
  ASSERT_EQ(run("verify --in " + path("g.fpnb") + " --eta 0.1 --m1 2"), 0) << slurp("stderr");
  EXPECT_EQ(summary_of(records()).at("profile"), "full");
}

TEST_F(Cli, OutputIndependentOfThreads) {
  ASSERT_EQ(run("construct --p 3 --alpha 0.5 --eta 0.1 --dims 2,3 --mus 8/9 --seed 5 --threads 1 --out " +
                path("a.fpn") + " --report " + path("a.ndjson")),
            0);
  ASSERT_EQ(run("construct --p 3 --alpha 0.5 --eta 0.1 --dims 2,3 --mus 8/9 --seed 5 --threads 6 --out " +
                path("b.fpn") + " --report " + path("b.ndjson")),
            0);
  EXPECT_EQ(slurp("a.ndjson"), slurp("b.ndjson"));
  EXPECT_EQ(slurp("a.fpn"), slurp("b.fpn"));
  ASSERT_EQ(run("scan --in " + path("a.fpn") + " --report " + path("s1.ndjson"), "APD_THREADS=1"), 0);
  ASSERT_EQ(run("scan --in " + path("a.fpn") + " --report " + path("s8.ndjson"), "APD_THREADS=8"), 0);
  EXPECT_EQ(slurp("s1.ndjson"), slurp("s8.ndjson"));
}

TEST_F(Cli, RoundIsReproducible) {
  apd::io::write_function_file(path("h.fpn"), apd::GFunction::constant(apd::Space(3, 6), 0.5), apd::io::Encoding::Text);
  ASSERT_EQ(run("round --in " + path("h.fpn") + " --eps-star 0.2 --seed 9 --retries 5 --out " + path("a.set")), 0)
      << slurp("stderr");
  ASSERT_EQ(run("round --in " + path("h.fpn") + " --eps-star 0.2 --seed 9 --retries 5 --out " + path("b.set")), 0);
  EXPECT_EQ(slurp("a.set"), slurp("b.set"));
  EXPECT_EQ(slurp("a.set").rfind("FPSET 1\n3\n6\n", 0), 0u);
  EXPECT_NE(slurp("stderr").find("warning"), std::string::npos);
  EXPECT_NE(run("round --in " + path("h.fpn") + " --eps-star 0.2 --out " + path("c.set")), 0);
}

TEST_F(Cli, TransformRoundTrip) {
  apd::io::write_function_file(path("f.fpn"), apd::GFunction::constant(apd::Space(5, 2), 0.3), apd::io::Encoding::Text);
  ASSERT_EQ(run("transform --in " + path("f.fpn") + " --out " + path("f.fps")), 0) << slurp("stderr");
  const json s = summary_of(records());
  EXPECT_NEAR(s.at("spectral_energy").get<double>(), s.at("mean_square").get<double>(), 1e-12);
  ASSERT_EQ(run("transform --inverse --in " + path("f.fps") + " --out " + path("g.fpn")), 0) << slurp("stderr");
  const apd::GFunction g = apd::io::read_function_file(path("g.fpn"));
  for (double v : g.values()) EXPECT_NEAR(v, 0.3, 1e-12);
}

TEST_F(Cli, RegularizeAndIncrement) {
  std::vector<double> v(81);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 3 == 0) ? 1.0 : 0.0;
  apd::io::write_function_file(path("f.fpn"), apd::GFunction(apd::Space(3, 4), v), apd::io::Encoding::Text);
  ASSERT_EQ(run("regularize --in " + path("f.fpn") + " --delta 0.3"), 0) << slurp("stderr");
  const json cert = summary_of(records());
  EXPECT_EQ(cert.at("large_spectrum_size"), 2);
  EXPECT_EQ(cert.at("subspace").at("codim"), 1);
  EXPECT_LE(cert.at("achieved_gap").get<double>(), 0.3);

  ASSERT_EQ(run("increment --in " + path("f.fpn") + " --epsilon 0.01 --eta 0.5"), 0) << slurp("stderr");
  const auto trace = records();
  EXPECT_EQ(trace.front().at("type"), "trace_step");
  EXPECT_TRUE(summary_of(trace).contains("termination"));
}

TEST_F(Cli, ErrorsAreSingleLineAndNonzero) {
  EXPECT_NE(run("scan --in " + path("missing.fpn")), 0);
  const std::string err = slurp("stderr");
  EXPECT_EQ(err.rfind("apd: error: ", 0), 0u);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
  EXPECT_NE(run("plan --mode upper --p 3 --epsilon 0.5 --alpha 0.5"), 0);
  EXPECT_NE(run("construct --p 3 --alpha 0.5 --eta 0.1 --dims 2,5 --mus 2/9 --seed 1 --attempts 20 --out " +
                path("x.fpn")),
            0);
  EXPECT_NE(slurp("stderr").find("BudgetExhausted"), std::string::npos);
}
