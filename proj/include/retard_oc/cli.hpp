#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retard_oc/registry.hpp"

namespace retard_oc {

enum class Command { solve_fbsm, solve_direct, verify_linear, verify_hj, transform, example_list,
                     example_run, cost };

struct RunSpec {
  Command command = Command::example_list;
  /// Registered name, or a path to a problem file.
  std::string problem;
  std::optional<int> subintervals;  // --N
  std::optional<int> substeps;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool analytic = false;
  /// "proposition" or a value-function file.
  std::string with_S = "proposition";
  /// trajectories.csv holding a candidate to verify or score.
  std::optional<std::string> candidate_csv;
};

enum ExitStatus { exit_ok = 0, exit_verification_failed = 1, exit_error = 2 };

/// Runs one command and writes its artifacts to spec.out_dir. Errors are
/// reported on `err` and mapped to exit_error.
int run(const RunSpec& spec, const Registry& registry, std::ostream& out, std::ostream& err);

/// Parses the command line (RETARD_OC_SEED is the --seed fallback) and runs.
int run_cli(int argc, const char* const* argv, const Registry& registry, std::ostream& out,
            std::ostream& err);

}  // namespace retard_oc
