#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "studies.hpp"

using namespace dynslip;
using namespace dynslip::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dynslip_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> problems_of(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const auto c = parse_config(R"(
[study]
name = sweep
domains = disk(1) | ellipse(2,1) | fourier(1;c=0,0.05;s=0.02)
alpha = -0.25
beta = 2
[mesh]
ladder = 0.2, 0.1
[lambda]
theta_over_pi = 0.6
angles_over_pi = 0, 0.25, -0.25
n_per_ray = 4
[time]
q = 2, 4
[run]
seed = 42
threads = 2
output = somewhere
)");
  EXPECT_EQ(c.study, Study::sweep);
  ASSERT_EQ(c.domains.size(), 3u);
  EXPECT_EQ(c.domains[1].id(), "ellipse(2,1)");
  EXPECT_FALSE(is_axisymmetric(c.domains[2]));
  EXPECT_EQ(c.alpha, -0.25);
  EXPECT_EQ(c.h_levels, (std::vector<double>{0.2, 0.1}));
  EXPECT_NEAR(c.theta, 0.6 * kPi, 1e-15);
  EXPECT_EQ(c.angles->size(), 3u);
  EXPECT_EQ(c.q, (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.output_dir, "somewhere");
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, DomainAndComplexParsing) {
  EXPECT_EQ(parse_domain("disk(2)").id(), DomainSpec::disk(2).id());
  EXPECT_THROW(parse_domain("square(1)"), InvalidArgument);
  EXPECT_EQ(parse_complex("1.5-2i"), cplx(1.5, -2.0));
  EXPECT_EQ(parse_complex("3"), cplx(3.0, 0.0));
  EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
}

TEST(Config, ReportsEveryProblem) {
  const auto p = problems_of(R"(
[study]
name = resolvent
beta = -1
colour = red
[mesh]
h = -0.1
)");
  // unknown key is reported by the parser before validation
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NE(p[0].find("study.colour"), std::string::npos);

  const auto q = problems_of(R"(
[study]
name = resolvent
beta = -1
data = nonsense
[mesh]
h = -0.1
[time]
q = 0.5
)");
  EXPECT_GE(q.size(), 5u);
}

TEST(Config, EmptySweepGridIsAnError) {
  const auto p = problems_of("[study]\nname = sweep\n[lambda]\nangles_over_pi =\n");
  ASSERT_FALSE(p.empty());
  EXPECT_NE(p[0].find("empty"), std::string::npos);
  EXPECT_FALSE(problems_of("[study]\nname = sweep\n[lambda]\nvalues =\n").empty());
}

TEST(Config, SingleLevelLadderIsAnError) {
  EXPECT_FALSE(problems_of("[study]\nname = convergence\n[mesh]\nh = 0.1\n").empty());
  ExperimentConfig c;
  c.study = Study::convergence;
  EXPECT_THROW(convergence_study(c), InvalidArgument);
}

TEST(Run, KornReportsAndManifest) {
  ExperimentConfig c;
  c.study = Study::korn;
  c.domains = {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0)};
  c.h_levels = {0.15};
  c.output_dir = scratch("korn").string();
  EXPECT_EQ(run(c), kSuccess);
  const auto reports = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "korn.json"));
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_LE(reports[0]["q2"].get<double>(), 1e-3);
  EXPECT_GE(reports[1]["q2"].get<double>(), 0.27);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "manifest.json"));
  for (const auto& [name, hash] : manifest["files"].items())
    EXPECT_EQ(hash.get<std::string>(), sha256_hex(slurp(fs::path(c.output_dir) / name))) << name;
  EXPECT_EQ(manifest["meshes"].size(), 2u);
  EXPECT_EQ(manifest["config_sha256"].get<std::string>(), sha256_hex(canonical_config(c)));
}

TEST(Run, ResolventErrorTable) {
  ExperimentConfig c;
  c.study = Study::resolvent;
  c.h_levels = {0.2};
  c.lambdas = std::vector<cplx>{{1.0, 1.0}, {4.0, -2.0}};
  c.output_dir = scratch("resolvent").string();
  EXPECT_EQ(run(c), kSuccess);
  std::istringstream table(slurp(fs::path(c.output_dir) / "resolvent.csv"));
  std::string header, line;
  std::getline(table, header);
  int rows = 0;
  while (std::getline(table, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) cols.push_back(f);
    EXPECT_LE(std::stod(cols[13]), 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST(Run, OutputsAreByteIdenticalOnRerun) {
  ExperimentConfig c;
  c.study = Study::maxreg;
  c.h_levels = {0.3};
  c.n_steps = {10};
  c.ensemble = 3;
  c.threads = 2;
  c.seed = 17;
  c.output_dir = scratch("det_a").string();
  run(c);
  const std::string a = slurp(fs::path(c.output_dir) / "maxreg.csv");
  c.output_dir = scratch("det_b").string();
  c.threads = 1;
  run(c);
  EXPECT_EQ(a, slurp(fs::path(c.output_dir) / "maxreg.csv"));
  c.seed = 18;
  c.output_dir = scratch("det_c").string();
  run(c);
  EXPECT_NE(a, slurp(fs::path(c.output_dir) / "maxreg.csv"));
}

TEST(Run, MeshCacheIsReused) {
  ExperimentConfig c;
  c.study = Study::korn;
  c.h_levels = {0.3};
  c.output_dir = scratch("cache").string();
  run(c);
  const auto first = slurp(fs::path(c.output_dir) / "manifest.json");
  run(c);
  EXPECT_EQ(first, slurp(fs::path(c.output_dir) / "manifest.json"));
}

TEST(Run, FlaggedSweepExitCode) {
  ExperimentConfig c;
  c.study = Study::sweep;
  c.domains = {DomainSpec::disk(1.0)};
  c.alpha = -1.0;
  c.h_levels = {0.3};
  c.lambdas = std::vector<cplx>{{2.0, 1.0}, {3.0, 0.5}};
  c.omega = 1.0;
  c.output_dir = scratch("flagged").string();
  EXPECT_EQ(run(c), kFlagged);
}

TEST(Convergence, ResolventOrder) {
  ExperimentConfig c;
  c.study = Study::convergence;
  c.data = "stream";
  c.h_levels = {0.4, 0.2, 0.1};
  const auto t = convergence_study(c);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_GE(t.fitted_order, 2.0);
}

TEST(Convergence, EvolveOrder) {
  ExperimentConfig c;
  c.study = Study::convergence;
  c.target = "evolve";
  c.h_levels = {0.3};
  c.n_steps = {10, 20, 40};
  const auto t = convergence_study(c);
  EXPECT_GE(t.fitted_order, 0.8);
  EXPECT_LE(t.fitted_order, 1.2);
}
