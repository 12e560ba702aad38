#pragma once

#include <cmath>
#include <vector>

#include "Highs.h"

namespace oos {

/// Fixes every integer column of `h` at its rounded incumbent value and
/// re-solves the remaining LP with tight tolerances.  On success `values` is
/// replaced by the polished point; otherwise it is left untouched.
inline bool polish_integers(Highs& h, std::vector<double>& values) {
  const HighsLp& lp = h.getLp();
  if (lp.integrality_.empty()) return false;
  const HighsInt n = lp.num_col_;
  std::vector<double> lo = lp.col_lower_, hi = lp.col_upper_;
  std::vector<HighsVarType> kinds(static_cast<std::size_t>(n), HighsVarType::kContinuous);
  for (HighsInt j = 0; j < n; ++j) {
    if (lp.integrality_[static_cast<std::size_t>(j)] == HighsVarType::kContinuous) continue;
    const double r = std::round(values[static_cast<std::size_t>(j)]);
    lo[static_cast<std::size_t>(j)] = hi[static_cast<std::size_t>(j)] = r;
  }
  h.changeColsBounds(0, n - 1, lo.data(), hi.data());
  h.changeColsIntegrality(0, n - 1, kinds.data());
  h.setOptionValue("primal_feasibility_tolerance", 1e-10);
  h.setOptionValue("dual_feasibility_tolerance", 1e-9);
  h.setOptionValue("presolve", "off");
  if (h.run() != HighsStatus::kOk || h.getModelStatus() != HighsModelStatus::kOptimal) return false;
  values = h.getSolution().col_value;
  return true;
}

}  // namespace oos
