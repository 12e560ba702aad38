#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oos/demand.hpp"
#include "oos/milp/builder.hpp"
#include "oos/milp/instance.hpp"
#include "oos/milp/solve.hpp"
#include "oos/scenario.hpp"

namespace oos::testing {

/// Source tree root, for configs and the catalog.
std::filesystem::path source_dir();

/// One servicer, one parking node, no depot or launcher: every decision is a
/// route and a choice of service starts, so brute force stays tractable.
struct MicroInstance {
  Scenario scenario;
  std::vector<CustomerSat> catalog;
  std::vector<ServiceNeed> needs;
  int horizon = 34;
};

enum class MicroPropulsion { high_thrust, low_thrust, multimodal };

/// Scenario with a servicer parked at "P" (longitude 0) carrying `load`.
Scenario micro_scenario(MicroPropulsion prop, double dry_mass, const std::map<std::string, double>& load,
                        const std::vector<ServiceTypeSpec>& services, bool tool_installed = true);

/// Seeded random micro instance: <= 3 nodes, 12 grid steps, <= 2 needs.
MicroInstance random_micro(std::uint64_t seed);

/// The mode-tradeoff instance: a tight need at C1 that only a high-thrust hop
/// reaches in time, then a loose need at C2, with biprop for one hop only.
MicroInstance mode_tradeoff_instance();

struct OracleLeg {
  int dep_day = 0;
  int arr_day = 0;
  std::string from, to;
  std::string mode;  // "high_thrust" or "low_thrust"
  int need_id = -1;  // need started on arrival
};

struct OracleResult {
  double best = 0.0;
  std::vector<OracleLeg> legs;
  std::vector<int> served;
  long long paths = 0;
};

/// Exhaustive search over every route, flight option and service choice of
/// the single servicer.  Propellant follows the same piecewise-linear curves
/// the planner uses; all other rules are re-derived here from raw inputs.
OracleResult enumerate(const MicroInstance& mi);

struct Solved {
  PlanningInstance inst;
  BuiltModel built;
  Solution sol;
};

Solved solve_micro(const MicroInstance& mi, const Backend& backend, double gap = 0.0);

/// Relative difference with a floor of 1 on the scale.
double rel_diff(double a, double b);

}  // namespace oos::testing
