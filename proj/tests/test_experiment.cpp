#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zrp/experiment.hpp"

namespace zrp {
namespace {

std::string field_of(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(ParseConfig, Examples) {
  const auto c = parse_config({"sample", "--A", "2", "--Theta", "1", "--gamma", "1", "--L", "8192", "--rho", "1",
                               "--seed", "7"});
  EXPECT_EQ(c.mode, "sample");
  EXPECT_EQ(c.particle_count(), 8192);
  EXPECT_DOUBLE_EQ(c.model().theta(), 8192.0);
  EXPECT_EQ(*c.seed, 7u);

  EXPECT_THROW(parse_config({"exact", "--L", "10", "--rho", "1", "--N", "100"}), ConflictingDensitySpec);
  EXPECT_EQ(field_of({"exact", "--L", "10", "--rho", "1", "--N", "100"}), "N/rho");
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--gamma", "0"}), "gamma");
}

TEST(ParseConfig, ErrorsNameTheField) {
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--theta", "-3"}), "theta");
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--Theta", "0"}), "Theta");
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--bogus", "1"}), "argv");
  EXPECT_EQ(field_of({"exact", "--L", "10"}), "N/rho");
  EXPECT_EQ(field_of({"sample", "--L", "10", "--N", "10"}), "seed");
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--variant", "x"}), "variant");
  EXPECT_EQ(field_of({"exact", "--L", "10", "--N", "10", "--A", "3", "--bulk-rates", "1"}), "bulk-rates");
  EXPECT_EQ(field_of({"tails", "--L", "10", "--N", "10", "--seed", "1", "--u-min", "2", "--u-max", "1"}), "u-grid");
  EXPECT_EQ(field_of({"--L", "10"}), "argv");
  EXPECT_EQ(field_of({"--help"}), "help");
}

TEST(ParseConfig, ConfigFile) {
  const auto path = std::filesystem::temp_directory_path() / "zrp_test_config.ini";
  {
    std::ofstream f(path);
    f << "A = 3\nbulk-rates = 1,2\nL = 12\nN = 30\nvariant = pd\ntheta = 40\n";
  }
  const auto c = parse_config({"exact", "--config", path.string()});
  EXPECT_EQ(c.A, 3);
  EXPECT_EQ(c.bulk_rates, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(c.variant, AboveVariant::PdRatio);
  EXPECT_DOUBLE_EQ(c.model().theta(), 40.0);
  {
    std::ofstream f(path);
    f << "L = 12\nN = 30\nunknown_key = 4\n";
  }
  EXPECT_THROW(parse_config({"exact", "--config", path.string()}), ConfigError);
  std::filesystem::remove(path);
}

std::string run_capture(const std::vector<std::string>& args, int* status = nullptr) {
  std::ostringstream out, diag;
  const int s = run_to_file(parse_config(args), out, diag);
  if (status) *status = s;
  return out.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

TEST(RunExperiment, ExactCsvMatchesLibrary) {
  int status = -1;
  const auto text = run_capture({"exact", "--A", "2", "--theta", "10", "--L", "2", "--N", "2"}, &status);
  EXPECT_EQ(status, 0);
  const auto ls = lines(text);
  ASSERT_GE(ls.size(), 3u);
  EXPECT_EQ(ls[0].rfind("# zrp ", 0), 0u);
  EXPECT_EQ(ls[1], "quantity,n,rho,value");
  bool found = false;
  for (const auto& l : ls)
    if (l.rfind("current,2,", 0) == 0) {
      EXPECT_NEAR(std::stod(l.substr(l.rfind(',') + 1)), 5.0 / 3.0, 1e-10);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  const std::vector<std::string> args{"tails", "--A", "2", "--L", "256", "--rho", "1", "--samples", "8", "--seed", "5"};
  setenv("ZRP_THREADS", "1", 1);
  const auto one = run_capture(args);
  setenv("ZRP_THREADS", "4", 1);
  const auto four = run_capture(args);
  unsetenv("ZRP_THREADS");
  EXPECT_EQ(one, four);
  const auto other = run_capture({"tails", "--A", "2", "--L", "256", "--rho", "1", "--samples", "8", "--seed", "6"});
  EXPECT_NE(one, other);
}

TEST(RunExperiment, TailCsvIsWellFormed) {
  const auto ls = lines(run_capture({"tails", "--A", "2", "--L", "512", "--rho", "1", "--samples", "4", "--seed", "1"}));
  EXPECT_EQ(ls[1], "u,site_tail,sb_tail,cluster_tail,cluster_sb_tail");
  double prev_u = -1.0;
  std::vector<double> prev(4, 2.0);
  for (std::size_t i = 2; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string f;
    std::getline(ss, f, ',');
    const double u = std::stod(f);
    EXPECT_GT(u, prev_u);
    prev_u = u;
    for (int k = 0; k < 4; ++k) {
      std::getline(ss, f, ',');
      const double v = std::stod(f);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, prev[k]);
      prev[k] = v;
    }
  }
}

TEST(RunExperiment, SampleRecordsConserveMass) {
  const auto ls = lines(run_capture({"sample", "--A", "3", "--L", "40", "--N", "90", "--samples", "3", "--seed", "2"}));
  EXPECT_EQ(ls[1], "record,sample,key,value");
  int finals = 0;
  for (const auto& l : ls)
    if (l.rfind("profile,", 0) == 0 && l.find(",40,") != std::string::npos) {
      EXPECT_EQ(l.substr(l.rfind(',') + 1), "90");
      ++finals;
    }
  EXPECT_EQ(finals, 3);
}

TEST(RunExperiment, SimulateReportsEventRate) {
  const auto text = run_capture({"simulate", "--A", "2", "--theta", "20", "--L", "8", "--N", "10", "--events",
                                 "200000", "--samples", "10", "--seed", "3", "--geometry", "ring"});
  EXPECT_NE(text.find("event_rate_per_site,0,0,"), std::string::npos);
}

TEST(RunExperiment, GcCurveAndCompare) {
  const auto ls = lines(run_capture({"gc-curve", "--A", "2", "--L", "64", "--points", "11"}));
  EXPECT_EQ(ls[1], "curve,x,finite_L,limit,canonical");
  EXPECT_EQ(ls.size(), 2u + 11u + 10u);

  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = (dir / "zrp_test_tail.csv").string();
  {
    std::ofstream f(csv);
    f << "# test\nu,sb_tail\n";
    for (int i = 0; i <= 100; ++i) f << i / 100.0 << "," << 1.0 - i / 100.0 << "\n";
  }
  int status = -1;
  auto res = run_capture({"compare", "--input", csv, "--reference", "beta11"}, &status);
  EXPECT_EQ(status, 0);
  EXPECT_NE(res.find("PASS"), std::string::npos);
  res = run_capture({"compare", "--input", csv, "--reference", "exp", "--threshold", "0.01"}, &status);
  EXPECT_EQ(status, 2);
  EXPECT_NE(res.find("FAIL"), std::string::npos);
  run_capture({"compare", "--input", csv, "--reference", "nope"}, &status);
  EXPECT_EQ(status, 1);
  std::filesystem::remove(csv);
}

TEST(RunExperiment, ResourceLimitExitCode) {
  int status = -1;
  run_capture({"exact", "--L", "100000", "--N", "100000", "--mem-budget", "1"}, &status);
  EXPECT_EQ(status, 3);
  run_capture({"sample", "--L", "100000", "--N", "100000", "--mem-budget", "1", "--sampler", "exact", "--seed", "1"},
              &status);
  EXPECT_EQ(status, 3);
}

}  // namespace
}  // namespace zrp
