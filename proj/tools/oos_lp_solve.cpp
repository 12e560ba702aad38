// Reads an LP file, solves it with HiGHS and writes `name value` lines.
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "Highs.h"
#include "oos/milp/highs_polish.hpp"

namespace {

std::string shortest(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve an LP-format model with HiGHS"};
  std::string model, out;
  double gap = 0.01, time_limit = 600.0;
  int threads = 1, seed = 0;
  app.add_option("--gap", gap, "relative MIP gap");
  app.add_option("--time-limit", time_limit, "seconds");
  app.add_option("--threads", threads);
  app.add_option("--seed", seed);
  app.add_option("model", model, "LP file")->required();
  app.add_option("solution", out, "output file")->required();
  CLI11_PARSE(app, argc, argv);

  Highs h;
  h.setOptionValue("output_flag", false);
  h.setOptionValue("threads", threads);
  h.setOptionValue("random_seed", seed);
  h.setOptionValue("mip_rel_gap", gap);
  h.setOptionValue("time_limit", time_limit);
  h.setOptionValue("mip_feasibility_tolerance", 1e-7);
  if (h.readModel(model) == HighsStatus::kError) {
    std::cerr << "cannot read " << model << "\n";
    return 2;
  }
  h.run();
  const auto ms = h.getModelStatus();
  const auto& info = h.getInfo();
  std::string status = "error";
  if (ms == HighsModelStatus::kOptimal)
    status = std::isfinite(info.mip_gap) && info.mip_gap > 1e-6 ? "gap_stopped" : "optimal";
  else if (ms == HighsModelStatus::kTimeLimit || ms == HighsModelStatus::kIterationLimit)
    status = "time_limit";
  else if (ms == HighsModelStatus::kInfeasible || ms == HighsModelStatus::kUnboundedOrInfeasible)
    status = "infeasible";
  else if (ms == HighsModelStatus::kUnbounded)
    status = "unbounded";

  std::ofstream os(out);
  os << "status " << status << "\n";
  os << "message " << h.modelStatusToString(ms) << "\n";
  if (info.primal_solution_status != kSolutionStatusFeasible || status == "infeasible") return 0;
  const double mip_gap = std::isfinite(info.mip_gap) ? info.mip_gap : 0.0;
  std::vector<double> values = h.getSolution().col_value;
  const std::vector<std::string> names = h.getLp().col_names_;
  oos::polish_integers(h, values);
  os << "gap " << shortest(mip_gap) << "\n";
  for (std::size_t j = 0; j < names.size(); ++j) os << names[j] << ' ' << shortest(values[j]) << "\n";
  return 0;
}
