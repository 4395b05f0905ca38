#include "retard_oc/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "retard_oc/cost.hpp"
#include "retard_oc/csv.hpp"
#include "retard_oc/problem_file.hpp"
#include "retard_oc/reduction.hpp"
#include "retard_oc/solve.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Loaded {
  std::optional<StateLinearProblem> linear;
  DelayedProblem general;
  const Example* example = nullptr;
};

Loaded load(const std::string& source, const Registry& registry) {
  Loaded l;
  if (registry.contains(source)) {
    l.example = &registry.get(source);
    if (l.example->is_state_linear()) l.linear = l.example->linear();
    l.general = l.example->general();
    return l;
  }
  std::error_code ec;
  if (!fs::is_regular_file(source, ec)) throw UnknownProblem(source);
  l.linear = load_problem_file(source);
  l.general = l.linear->to_delayed();
  return l;
}

const StateLinearProblem& require_linear(const Loaded& l, const std::string& command) {
  if (!l.linear) throw Error(command + " needs a state-linear problem");
  return *l.linear;
}

class Artifacts {
 public:
  Artifacts(const RunSpec& spec, std::ostream& out) : dir_(spec.out_dir), out_(out) {
    fs::create_directories(dir_);
  }

  void add(const std::string& key, const std::string& value) { summary_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, num(value)); }

  void certificate(const Certificate& cert) {
    write("certificate.txt", cert.to_text());
    write("certificate.json", cert.to_json() + "\n");
  }

  void trajectories(const CommensurabilityLattice& lattice, const Trajectory& state,
                    const Trajectory& control, const AdjointTrajectory* eta) {
    std::ofstream f(dir_ / "trajectories.csv", std::ios::binary);
    write_trajectories_csv(f, lattice, state, control, eta);
    if (!f) throw Error("cannot write " + (dir_ / "trajectories.csv").string());
  }

  void finish() {
    std::ostringstream ss;
    for (const auto& [k, v] : summary_) ss << k << ": " << v << "\n";
    write("summary.txt", ss.str());
    out_ << ss.str();
  }

 private:
  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << text;
    if (!f) throw Error("cannot write " + (dir_ / name).string());
  }

  fs::path dir_;
  std::ostream& out_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

IntegratorConfig integrator_config(const RunSpec& spec) {
  IntegratorConfig cfg;
  if (spec.substeps) cfg.substeps_per_cell = *spec.substeps;
  return cfg;
}

Trajectory control_for_output(const DelayedProblem& p, const Trajectory& control) {
  return with_control_history(control, p.control_history);
}

CandidateSolution candidate_from_csv(const std::string& path, const DelayedProblem& p) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  const CsvTable table = read_trajectories_csv(f);
  const auto lattice = p.lattice();
  std::vector<std::string> xs, us;
  for (int i = 1; i <= p.n; ++i) xs.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= p.m; ++i) us.push_back("u_" + std::to_string(i));
  CandidateSolution c;
  c.state = csv_trajectory(table, xs, lattice).with_history(p.state_history);
  c.control = csv_trajectory(table, us, lattice);
  return c;
}

std::optional<CandidateSolution> find_candidate(const RunSpec& spec, const Loaded& l) {
  if (spec.candidate_csv) return candidate_from_csv(*spec.candidate_csv, l.general);
  if (l.example && l.example->candidate) return l.example->candidate();
  return std::nullopt;
}

/// Sup distance of two trajectories over a grid of [a, b].
double sup_distance(const CommensurabilityLattice& lattice, const Trajectory& p,
                    const Trajectory& q) {
  double worst = 0.0;
  for (const Rational& t : lattice_samples(lattice, 200)) {
    const Side side = t == lattice.b() ? Side::left : Side::right;
    worst = std::max(worst, (p.eval(t, side) - q.eval(t, side)).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

void compare_with_analytic(Artifacts& art, const Loaded& l, const CandidateSolution& sol) {
  if (!l.example || !l.example->candidate) return;
  const CandidateSolution ref = l.example->candidate();
  const auto lattice = l.general.lattice();
  art.add("control_sup_distance", sup_distance(lattice, sol.control, ref.control));
  art.add("state_sup_distance", sup_distance(lattice, sol.state, ref.state));
}

int solve_fbsm_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const StateLinearProblem& p = require_linear(l, "solve-fbsm");
  SweepConfig cfg;
  cfg.integrator = integrator_config(spec);
  if (spec.tol) cfg.tol = *spec.tol;
  SweepResult res;
  bool converged = true;
  try {
    res = solve_fbsm(p, zero_control(p), cfg);
  } catch (const NoConvergenceWith<SweepResult>& e) {
    res = e.result();
    converged = false;
  }
  Artifacts art(spec, out);
  art.add("command", "solve-fbsm");
  art.add("problem", p.name);
  art.add("cost", *res.solution.cost);
  art.add("iterations", std::to_string(res.iterations));
  art.add("converged", converged ? "yes" : "no");
  art.add("final_change", res.final_change);
  art.add("omega", res.omega);
  compare_with_analytic(art, l, res.solution);
  art.trajectories(p.lattice(), res.solution.state,
                   control_for_output(l.general, res.solution.control), &res.eta);
  art.finish();
  return converged ? exit_ok : exit_error;
}

int solve_direct_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  TranscriptionConfig cfg;
  cfg.integrator = integrator_config(spec);
  if (spec.subintervals) cfg.subintervals = *spec.subintervals;
  if (spec.tol) cfg.gradient_tol = *spec.tol;
  DirectResult res;
  bool converged = true;
  try {
    res = l.linear ? solve_direct_euler(*l.linear, cfg) : solve_direct_euler(l.general, cfg);
  } catch (const NoConvergenceWith<DirectResult>& e) {
    res = e.result();
    converged = false;
  }
  std::optional<AdjointTrajectory> eta;
  if (l.linear)
    eta = integrate_adjoint_linear(*l.linear, res.solution, cfg.integrator);
  else if (l.general.terminal.is_free())
    eta = integrate_adjoint_nonlinear(l.general, res.solution, cfg.integrator);

  Artifacts art(spec, out);
  art.add("command", "solve-direct");
  art.add("problem", l.general.name);
  art.add("subintervals", std::to_string(cfg.subintervals));
  art.add("cost", *res.solution.cost);
  art.add("discrete_objective", res.discrete_objective);
  art.add("iterations", std::to_string(res.iterations));
  art.add("converged", converged ? "yes" : "no");
  art.add("stationarity", res.stationarity);
  compare_with_analytic(art, l, res.solution);
  art.trajectories(l.general.lattice(), res.solution.state,
                   control_for_output(l.general, res.solution.control), eta ? &*eta : nullptr);
  art.finish();
  return converged ? exit_ok : exit_error;
}

int verify_linear_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const StateLinearProblem& p = require_linear(l, "verify-linear");
  LinearVerifyConfig cfg;
  cfg.integrator = integrator_config(spec);
  cfg.seed = cfg.convexity.seed = spec.seed;
  if (spec.tol) cfg.tol = cfg.admissibility_tol = cfg.convexity.tol = *spec.tol;

  std::optional<CandidateSolution> cand = find_candidate(spec, l);
  std::string source = spec.candidate_csv ? "csv" : "registered";
  if (!cand) {
    SweepConfig sweep;
    sweep.integrator = cfg.integrator;
    cand = solve_fbsm(p, zero_control(p), sweep).solution;
    source = "solve-fbsm";
  }
  std::optional<AdjointTrajectory> override_eta;
  if (l.example && l.example->adjoint_override) override_eta = l.example->adjoint_override();

  const Certificate cert = verify_state_linear(p, *cand, cfg, override_eta);
  const AdjointTrajectory eta =
      override_eta ? *override_eta : integrate_adjoint_linear(p, *cand, cfg.integrator);

  Artifacts art(spec, out);
  art.add("command", "verify-linear");
  art.add("problem", p.name);
  art.add("candidate", source);
  if (cert.cost) art.add("cost", *cert.cost);
  art.add("overall", cert.overall() ? "PASS" : "FAIL");
  for (const auto& name : cert.failed()) art.add("failed", name);
  art.certificate(cert);
  art.trajectories(p.lattice(), cand->state, control_for_output(l.general, cand->control), &eta);
  art.finish();
  return cert.overall() ? exit_ok : exit_verification_failed;
}

/// -d2 S along the state, one segment per piece of S.
AdjointTrajectory costate_from_value_function(const ValueFunctionCandidate& S,
                                              const Trajectory& state) {
  std::vector<Segment> segs;
  const int n = state.dimension();
  for (const auto& pc : S.pieces()) {
    const double hi = pc.end.to_double();
    auto f = [S, state, hi](double t) {
      const Side side = t >= hi ? Side::left : Side::right;
      const double at = std::min(t, hi);
      return Vector(-S.d2(at, state.eval(at, side), side));
    };
    segs.push_back(Segment{pc.start, pc.end, std::make_shared<FunctionCurve>(n, f)});
  }
  return {Trajectory(n, S.pieces().front().start, std::move(segs))};
}

int verify_hj_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const DelayedProblem& p = l.general;
  ValueFunctionCandidate S;
  if (spec.with_S == "proposition") {
    if (!l.example || !l.example->value_function)
      throw Error("problem '" + spec.problem + "' has no registered value function; pass --with-S FILE");
    S = l.example->value_function();
  } else {
    S = load_value_function_file(spec.with_S, p.lattice(), p.n);
  }
  const std::optional<CandidateSolution> cand = find_candidate(spec, l);
  if (!cand) throw Error("verify-hj needs a candidate; pass --candidate FILE");

  Feedback feedback;
  if (l.example && l.example->feedback && !spec.candidate_csv) {
    feedback = l.example->feedback;
  } else {
    const Trajectory u = cand->control;
    feedback = [u](double t, const Vector&, const Vector&, const Vector&) { return u.eval(t); };
  }
  HJConfig cfg;
  if (spec.tol) cfg.tol = *spec.tol;
  Certificate cert = verify_nonlinear_hj(p, *cand, S, feedback, cfg);
  cert.seed = spec.seed;
  const AdjointTrajectory eta = costate_from_value_function(S, cand->state);

  Artifacts art(spec, out);
  art.add("command", "verify-hj");
  art.add("problem", p.name);
  art.add("value_function", spec.with_S);
  if (cert.cost) art.add("cost", *cert.cost);
  art.add("overall", cert.overall() ? "PASS" : "FAIL");
  for (const auto& name : cert.failed()) art.add("failed", name);
  art.certificate(cert);
  art.trajectories(p.lattice(), cand->state, control_for_output(p, cand->control), &eta);
  art.finish();
  return cert.overall() ? exit_ok : exit_verification_failed;
}

int transform_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const DelayedProblem& p = l.general;
  const auto lattice = p.lattice();
  const IntegratorConfig icfg = integrator_config(spec);
  CandidateSolution cand;
  if (auto found = find_candidate(spec, l)) {
    cand = *found;
  } else {
    cand.control = zero_control(p);
    cand.state = integrate_forward(p, cand.control, icfg);
  }
  const AugmentedProblem aug = l.linear ? augment(*l.linear, lattice) : augment(p, lattice);
  const StackedSolution stacked = stack(cand, aug);
  const CandidateSolution back = reassemble(stacked, aug);
  const double original = evaluate_cost(p, cand);
  const double augmented = augmented_cost(aug, stacked);
  const Trajectory ode_state = integrate_augmented(aug, stacked.control, icfg);
  const Trajectory dde_state = integrate_forward(p, cand.control, icfg);
  const StackedSolution dde_stacked = stack(CandidateSolution{dde_state, cand.control, {}}, aug);
  double integration_gap = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double sigma = aug.length() * k / 200.0;
    integration_gap = std::max(integration_gap,
                               (ode_state.eval(sigma, Side::left) -
                                dde_stacked.state.eval(sigma, Side::left)).lpNorm<Eigen::Infinity>());
  }

  Artifacts art(spec, out);
  art.add("command", "transform");
  art.add("problem", p.name);
  art.add("cells", std::to_string(aug.cells));
  art.add("h", aug.h.str());
  art.add("state_offset", std::to_string(aug.state_offset));
  art.add("control_offset", std::to_string(aug.control_offset));
  art.add("stacked_state_dimension", std::to_string(aug.stacked_state_dimension()));
  art.add("stacked_control_dimension", std::to_string(aug.stacked_control_dimension()));
  art.add("linkage_residual", linkage_residual(stacked.state, aug));
  art.add("cost", original);
  art.add("augmented_cost", augmented);
  art.add("cost_gap", std::fabs(original - augmented));
  art.add("integration_gap", integration_gap);
  art.trajectories(lattice, back.state, control_for_output(p, back.control), nullptr);
  art.finish();
  return exit_ok;
}

int cost_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const std::optional<CandidateSolution> cand = find_candidate(spec, l);
  if (!cand) throw Error("cost needs a candidate; pass --candidate FILE");
  const double cost = l.linear ? evaluate_cost(*l.linear, *cand) : evaluate_cost(l.general, *cand);
  Artifacts art(spec, out);
  art.add("command", "cost");
  art.add("problem", l.general.name);
  art.add("cost", cost);
  art.trajectories(l.general.lattice(), cand->state, control_for_output(l.general, cand->control),
                   nullptr);
  art.finish();
  return exit_ok;
}

int example_run_cmd(const RunSpec& spec, const Loaded& l, std::ostream& out) {
  const Example& ex = *l.example;
  if (spec.analytic) {
    if (!ex.candidate) throw Error("example '" + ex.name + "' has no closed-form candidate");
    if (ex.verify == "verify-hj" && ex.value_function) return verify_hj_cmd(spec, l, out);
    if (l.linear) {
      if (!ex.adjoint || ex.adjoint_override) return verify_linear_cmd(spec, l, out);
      // Closed-form x, u and eta straight from the registry, verified as well.
      const CandidateSolution cand = ex.candidate();
      const AdjointTrajectory eta = ex.adjoint();
      LinearVerifyConfig cfg;
      cfg.integrator = integrator_config(spec);
      cfg.seed = cfg.convexity.seed = spec.seed;
      if (spec.tol) cfg.tol = cfg.admissibility_tol = cfg.convexity.tol = *spec.tol;
      const Certificate cert = verify_state_linear(*l.linear, cand, cfg);
      Artifacts art(spec, out);
      art.add("command", "example run --analytic");
      art.add("problem", ex.name);
      art.add("cost", evaluate_cost(*l.linear, cand));
      art.add("overall", cert.overall() ? "PASS" : "FAIL");
      for (const auto& name : cert.failed()) art.add("failed", name);
      art.certificate(cert);
      art.trajectories(l.general.lattice(), cand.state, control_for_output(l.general, cand.control),
                       &eta);
      art.finish();
      return cert.overall() ? exit_ok : exit_verification_failed;
    }
    return cost_cmd(spec, l, out);
  }
  return l.linear ? solve_fbsm_cmd(spec, l, out) : solve_direct_cmd(spec, l, out);
}

}  // namespace

int run(const RunSpec& spec, const Registry& registry, std::ostream& out, std::ostream& err) {
  try {
    if (spec.command == Command::example_list) {
      for (const auto& ex : registry.all()) out << ex.name << "\t" << ex.summary << "\n";
      return exit_ok;
    }
    const Loaded l = load(spec.problem, registry);
    switch (spec.command) {
      case Command::solve_fbsm: return solve_fbsm_cmd(spec, l, out);
      case Command::solve_direct: return solve_direct_cmd(spec, l, out);
      case Command::verify_linear: return verify_linear_cmd(spec, l, out);
      case Command::verify_hj: return verify_hj_cmd(spec, l, out);
      case Command::transform: return transform_cmd(spec, l, out);
      case Command::cost: return cost_cmd(spec, l, out);
      case Command::example_run:
        if (!l.example) throw UnknownProblem(spec.problem);
        return example_run_cmd(spec, l, out);
      case Command::example_list: break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return exit_error;
}

int run_cli(int argc, const char* const* argv, const Registry& registry, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Delayed optimal control: solvers, sufficiency verifiers, reduction", "retard-oc"};
  app.require_subcommand(1);
  RunSpec spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> candidate;

  auto options = [&](CLI::App* sub) {
    sub->add_option("--N", spec.subintervals, "Euler subintervals of the direct solver")
        ->check(CLI::PositiveNumber);
    sub->add_option("--substeps", spec.substeps, "Runge-Kutta steps per lattice cell")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", spec.tol, "Verification or convergence tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed of the randomized probes (default: $RETARD_OC_SEED or 0)");
    sub->add_option("--out", spec.out_dir, "Output directory");
    sub->add_option("--candidate", candidate, "trajectories.csv holding the candidate");
  };
  auto problem_command = [&](const std::string& name, Command cmd, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("problem", spec.problem, "Registered name or problem file")->required();
    options(sub);
    sub->callback([&spec, cmd] { spec.command = cmd; });
    return sub;
  };

  problem_command("solve-fbsm", Command::solve_fbsm, "Forward-backward sweep");
  problem_command("solve-direct", Command::solve_direct, "Forward-Euler single shooting");
  problem_command("verify-linear", Command::verify_linear, "State-linear sufficiency certificate");
  problem_command("verify-hj", Command::verify_hj, "Hamilton-Jacobi certificate")
      ->add_option("--with-S", spec.with_S, "'proposition' or a value-function file");
  problem_command("transform", Command::transform, "Reduce to a delay-free problem");
  problem_command("cost", Command::cost, "Cost of a candidate");

  CLI::App* example = app.add_subcommand("example", "Registered problems");
  example->require_subcommand(1);
  example->add_subcommand("list", "List registered problems")->callback([&spec] {
    spec.command = Command::example_list;
  });
  CLI::App* run_sub = example->add_subcommand("run", "Solve, or with --analytic verify, an example");
  run_sub->add_option("name", spec.problem, "Registered name")->required();
  run_sub->add_flag("--analytic", spec.analytic, "Use the closed-form candidate");
  run_sub->add_option("--with-S", spec.with_S, "'proposition' or a value-function file");
  options(run_sub);
  run_sub->callback([&spec] { spec.command = Command::example_run; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }
  if (seed) {
    spec.seed = *seed;
  } else if (const char* env = std::getenv("RETARD_OC_SEED")) {
    char* end = nullptr;
    spec.seed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      err << "error: RETARD_OC_SEED must be an unsigned integer\n";
      return exit_error;
    }
  }
  spec.candidate_csv = candidate;
  return run(spec, registry, out, err);
}

}  // namespace retard_oc
