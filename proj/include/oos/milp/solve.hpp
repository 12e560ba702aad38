#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oos/milp/model.hpp"

namespace oos {

enum class SolveStatus { optimal, gap_stopped, time_limit, infeasible, unbounded, error };

std::string to_string(SolveStatus s);
SolveStatus parse_status(const std::string& s);

struct SolveOptions {
  double mip_gap = 0.01;
  double time_limit = 600.0;  // s
  int threads = 1;
  int seed = 0;
  bool verbose = false;
};

struct Solution {
  SolveStatus status = SolveStatus::error;
  double objective = 0.0;
  double gap = 0.0;
  std::vector<double> values;  // one per model column, empty without a point
  std::string message;
  std::vector<std::string> iis_rows;  // irreducible infeasible rows, when known

  bool has_point() const { return !values.empty(); }
  /// Feasible point found (optimal, gap-stopped, or time-limited with incumbent).
  bool accepted() const {
    return has_point() && (status == SolveStatus::optimal || status == SolveStatus::gap_stopped ||
                           status == SolveStatus::time_limit);
  }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual Solution solve(const MilpModel& model, const SolveOptions& options) const = 0;
};

/// HiGHS in process.  After the branch and bound the integers are fixed and
/// the LP is re-solved with tight tolerances so continuous flows balance to
/// well below the audit threshold.
class HighsBackend : public Backend {
 public:
  std::string name() const override { return "highs"; }
  Solution solve(const MilpModel& model, const SolveOptions& options) const override;
};

/// Writes the model as an LP file, runs an external command
/// `cmd --gap G --time-limit T --threads N --seed S model.lp solution.txt`,
/// and reads back `name value` lines.
class LpFileBackend : public Backend {
 public:
  explicit LpFileBackend(std::string command);
  std::string name() const override { return "lp"; }
  Solution solve(const MilpModel& model, const SolveOptions& options) const override;
  const std::string& command() const { return command_; }

 private:
  std::string command_;
};

/// OOS_LP_SOLVER if set, else `oos-lp-solve` next to the running executable,
/// else `oos-lp-solve` on PATH.
std::string default_lp_solver_command();

/// "highs", "lp" (default command) or "lp:<command>".
std::unique_ptr<Backend> make_backend(const std::string& spec);

/// CPLEX LP text of the model.
std::string write_lp(const MilpModel& model);

/// Parses solver output: `status <s>`, `objective <x>`, `gap <x>` header
/// lines followed by `name value` lines.  Missing columns read as zero.
Solution parse_solution_text(const std::string& text, const MilpModel& model);

}  // namespace oos
