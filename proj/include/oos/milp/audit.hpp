#pragma once

#include <string>
#include <vector>

#include "oos/milp/builder.hpp"

namespace oos {

struct Violation {
  std::string family;  // "eq7", "eq16", "bounds", "integrality", ...
  std::string key;     // subscripts, e.g. "v0_i3_t5_k1"
  double residual = 0.0;
};

struct AuditReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary(std::size_t max_lines = 10) const;
};

/// Re-evaluates every constraint family directly from the network, the
/// window needs and the scenario data, looking variables up through the
/// variable space.  The model's own rows are never read; the model is used
/// only for column kinds and lambda/selector indices.
AuditReport audit(const PlanningInstance& inst, const BuiltModel& built, const std::vector<double>& values,
                  double tol = 1e-6);

}  // namespace oos
