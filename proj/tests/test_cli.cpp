#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "retard_oc/cli.hpp"
#include "retard_oc/cost.hpp"
#include "retard_oc/csv.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/problem_file.hpp"

using namespace retard_oc;
namespace fs = std::filesystem;

namespace {

const char* kLinearFile = R"(# x' = x + x(t-2) - 10 u(t-1)
name = file_linear
a = 0
b = 4
r = 2
s = 1
n = 1
m = 1
A = [[1]]
A_D = [[1]]
g_D.lin = [[-10]]
cost.x = [1]
cost.uu = [[100]]
phi = [1]
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("retard_oc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

struct CliRun {
  int status;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args, const Registry& reg = Registry::builtin()) {
  args.insert(args.begin(), "retard-oc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), reg, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

double summary_value(const fs::path& dir, const std::string& key) {
  std::istringstream in(slurp(dir / "summary.txt"));
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
  ADD_FAILURE() << "no key " << key;
  return 0.0;
}

}  // namespace

TEST(ProblemFile, ParsesLinearExample) {
  const StateLinearProblem p = parse_problem(kLinearFile);
  EXPECT_EQ(p.name, "file_linear");
  EXPECT_EQ(p.lattice().cells(), 4);
  const CandidateSolution c = linear_example_candidate();
  EXPECT_NEAR(evaluate_cost(p, c), oracle::kLinearCost, 1e-10);
  const Vector x = Vector::Constant(1, 2.0), u = Vector::Constant(1, 0.5);
  EXPECT_EQ(p.g_D(0.0, u)[0], -5.0);
  EXPECT_EQ(p.state_cost(0.0, x, x), 2.0);
}

TEST(ProblemFile, PolynomialsAndBox) {
  const StateLinearProblem p = parse_problem(
      "a = 0\nb = 1\nr = 1/2\ns = 0\nn = 1\nm = 1\nA = [[poly(0, 1)]]\n"
      "g.lin = [[1]]\ng.quad.1 = [[0.5]]\ncost.uu = [[1]]\nphi = [poly(1, 0, 2)]\n"
      "U = box [-1] [2]\n");
  EXPECT_EQ(p.A(3.0)(0, 0), 3.0);
  EXPECT_EQ(p.state_history.eval(-0.5)[0], 1.5);
  EXPECT_EQ(p.g(0.0, Vector::Constant(1, 2.0))[0], 4.0);
  EXPECT_EQ(p.g_jacobian(0.0, Vector::Constant(1, 2.0))(0, 0), 3.0);
  EXPECT_TRUE(p.controls.is_box());
  EXPECT_EQ(p.controls.upper()[0], 2.0);
}

TEST(ProblemFile, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse_problem(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("a = 0\nb = 1\nr = oops\n"), 3);
  EXPECT_EQ(line_of("a = 0\nb = 1\n\nbogus line\n"), 4);
  EXPECT_EQ(line_of("a = 0\nb = 1\nr = 1\ns = 0\nn = 1\nm = 1\nA = [[1, 2]]\n"), 7);
  EXPECT_EQ(line_of("a = 0\na = 1\n"), 2);
  std::string with_unknown = kLinearFile;
  with_unknown += "colour = 3\n";
  EXPECT_EQ(line_of(with_unknown), 15);
}

TEST(ValueFunctionFile, AffinePieces) {
  const auto lat = make_lattice(Rational(0), Rational(2), Rational(1), Rational(1));
  const auto S = parse_value_function("eta.0 = [poly(1, 2)]\nc.0 = 3\neta.1 = [0]\nc.1 = poly(0, 0, 1)\n", lat, 1);
  const Vector x = Vector::Constant(1, 2.0);
  EXPECT_EQ(S.S(0.5, x), (1.0 + 1.0) * 2.0 + 3.0);
  EXPECT_EQ(S.d1(0.5, x), 4.0);
  EXPECT_EQ(S.S(1.5, x), 2.25);
  EXPECT_EQ(S.d2(1.5, x)[0], 0.0);
  EXPECT_THROW(parse_value_function("eta.0 = [1]\nc.0 = 0\n", lat, 1), ParseError);
}

TEST(Csv, OutputGridHasBreakpoints) {
  const auto lat = make_lattice(Rational(0), Rational(1), Rational(1, 3), Rational(0));
  const auto grid = output_grid(lat, Rational(-1, 3), 10);
  EXPECT_EQ(grid.front(), Rational(-1, 3));
  EXPECT_EQ(grid.back(), Rational(1));
  EXPECT_NE(std::find(grid.begin(), grid.end(), Rational(2, 3)), grid.end());
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(std::adjacent_find(grid.begin(), grid.end()), grid.end());
}

TEST(CliProperty, CsvRoundTrip) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  const auto eta = linear_example_adjoint();
  std::stringstream ss;
  write_trajectories_csv(ss, p.lattice(), c.state, c.control, &eta);
  const CsvTable table = read_trajectories_csv(ss);
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "x_1", "u_1", "eta_1"}));
  EXPECT_EQ(table.t.front(), -2.0);
  EXPECT_TRUE(std::isnan(table.values.front()[table.column("eta_1")]));
  const Trajectory x = csv_trajectory(table, {"x_1"}, p.lattice());
  const Trajectory u = csv_trajectory(table, {"u_1"}, p.lattice());
  for (std::size_t k = 0; k < table.t.size(); ++k) {
    const double t = table.t[k];
    if (t < 0.0) continue;
    EXPECT_LE(std::fabs(table.sample("x_1", t) - c.state.eval(t)[0]), 1e-12);
    EXPECT_LE(std::fabs(x.eval(t)[0] - c.state.eval(t)[0]), 1e-12);
    EXPECT_LE(std::fabs(u.eval(t)[0] - c.control.eval(t)[0]), 1e-12);
    EXPECT_LE(std::fabs(table.sample("eta_1", t) - eta(t)[0]), 1e-12);
  }
}

TEST(Cli, ExampleListing) {
  const CliRun r = cli({"example", "list"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("ocp-ld-paper"), std::string::npos);
  EXPECT_NE(r.out.find("ocp-d-goellmann"), std::string::npos);
  EXPECT_NE(r.out.find("zero-dynamics"), std::string::npos);
}

TEST(Cli, EmptyRegistryListsNothing) {
  const CliRun r = cli({"example", "list"}, Registry());
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, AnalyticLinearExample) {
  const fs::path dir = scratch("analytic");
  const CliRun r = cli({"example", "run", "ocp-ld-paper", "--analytic", "--out", dir.string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(summary_value(dir, "cost"), oracle::kLinearCostPaperDecimal, 1e-6);
  std::ifstream f(dir / "trajectories.csv");
  const CsvTable table = read_trajectories_csv(f);
  for (double t : {0.5, 1.5, 2.5, 3.5}) {
    EXPECT_NEAR(table.sample("x_1", t), oracle::linear_x(t), 1e-12);
    EXPECT_NEAR(table.sample("u_1", t), oracle::linear_u(t), 1e-12);
    EXPECT_NEAR(table.sample("eta_1", t), oracle::linear_eta(t), 1e-12);
  }
  EXPECT_TRUE(fs::exists(dir / "certificate.txt"));
  EXPECT_TRUE(fs::exists(dir / "certificate.json"));
}

TEST(Cli, VerifyHjProposition) {
  const fs::path dir = scratch("hj");
  const CliRun r = cli({"verify-hj", "ocp-d-goellmann", "--with-S", "proposition", "--out", dir.string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(slurp(dir / "certificate.txt").find("overall: PASS"), std::string::npos);
}

TEST(Cli, SolveDirect) {
  const fs::path dir = scratch("direct");
  const CliRun r = cli({"solve-direct", "ocp-ld-paper", "--N", "2000", "--out", dir.string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(summary_value(dir, "cost"), oracle::kLinearCostPaperDecimal, 1e-2);
}

TEST(Cli, ProblemFileThroughSolver) {
  const fs::path dir = scratch("file");
  fs::create_directories(dir);
  std::ofstream(dir / "linear.ocp") << kLinearFile;
  const CliRun r = cli({"solve-fbsm", (dir / "linear.ocp").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(summary_value(dir / "out", "cost"), oracle::kLinearCost, 1e-6);
}

TEST(Cli, CandidateFromCsv) {
  const fs::path dir = scratch("candidate");
  ASSERT_EQ(cli({"example", "run", "ocp-ld-paper", "--analytic", "--out", dir.string()}).status, 0);
  const CliRun r = cli({"cost", "ocp-ld-paper", "--candidate", (dir / "trajectories.csv").string(),
                     "--out", (dir / "cost").string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(summary_value(dir / "cost", "cost"), oracle::kLinearCost, 1e-4);
}

TEST(Cli, Transform) {
  const fs::path dir = scratch("transform");
  const CliRun r = cli({"transform", "ocp-d-goellmann", "--out", dir.string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_LE(summary_value(dir, "cost_gap"), 1e-10);
  EXPECT_LE(summary_value(dir, "integration_gap"), 1e-8);
}

TEST(Cli, Errors) {
  EXPECT_EQ(cli({"verify-linear", "no-such-problem", "--out", scratch("err").string()}).status, 2);
  EXPECT_EQ(cli({"frobnicate"}).status, 2);
  const fs::path dir = scratch("malformed");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ocp") << "a = 0\nb = 1\nr = ?\n";
  const CliRun r = cli({"solve-fbsm", (dir / "bad.ocp").string(), "--out", dir.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(CliProperty, ExitStatusOfPerturbations) {
  const std::vector<std::pair<std::string, std::string>> fixtures{
      {"verify-linear", "ocp-ld-paper-control-bump"},
      {"verify-linear", "ocp-ld-paper-eta-shift"},
      {"verify-linear", "ocp-ld-paper-concave-cost"},
      {"verify-hj", "ocp-d-goellmann-zeroed-control"},
      {"verify-hj", "ocp-d-goellmann-eta3-scaled"},
      {"verify-hj", "ocp-d-goellmann-c3-shifted"}};
  for (const auto& [cmd, name] : fixtures)
    EXPECT_EQ(cli({cmd, name, "--out", scratch(name).string()}).status, 1) << name;
}

TEST(CliProperty, DeterministicOutput) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b})
    ASSERT_EQ(cli({"verify-linear", "ocp-ld-paper", "--seed", "42", "--out", dir.string()}).status, 0);
  EXPECT_EQ(slurp(a / "trajectories.csv"), slurp(b / "trajectories.csv"));
  EXPECT_EQ(slurp(a / "certificate.txt"), slurp(b / "certificate.txt"));
}

TEST(Cli, SeedFromEnvironment) {
  const fs::path dir = scratch("seed");
  setenv("RETARD_OC_SEED", "1234", 1);
  const CliRun r = cli({"verify-linear", "ocp-ld-paper", "--out", dir.string()});
  unsetenv("RETARD_OC_SEED");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(slurp(dir / "certificate.txt").find("seed: 1234"), std::string::npos);
}
