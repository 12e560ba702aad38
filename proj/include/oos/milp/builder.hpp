#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "oos/milp/instance.hpp"
#include "oos/milp/model.hpp"

namespace oos {

/// Largest amount of commodity `k` a design may hold (units; kg for
/// continuous commodities).  Zero means the design cannot carry it.  A tool
/// fits only on a design that has it installed (one unit); other commodities
/// without an explicit capacity fall back to the payload limit.
double carry_capacity(const VehicleDesign& design, const CommoditySpec& k);

/// Dense variable indices keyed by the network objects they belong to.
/// Every lookup returns -1 for a variable that does not exist.
struct VariableSpace {
  std::vector<int> yp, ym;               // per holdover
  std::vector<std::vector<int>> xp, xm;  // per holdover, per commodity
  std::vector<int> wp, wm;               // per arc; wm is -1 for expendable launchers
  std::vector<std::vector<int>> up, um;  // per arc, per commodity
  std::vector<int> z;                    // per servicer transport arc
  std::vector<int> sos;                  // per arc: index into MilpModel::sos2
  std::map<std::array<int, 3>, int> h;   // (vehicle, need, start step)
  std::map<std::array<int, 3>, int> b;   // (vehicle, need, step)
  std::vector<std::vector<double>> caps;  // per vehicle, per commodity
  std::vector<int> flight_propellant;     // per arc: commodity index, -1 for launches
  std::vector<int> reserve_route;         // per vehicle, -1 when not a servicer
  std::vector<double> reserve_coefficient;

  int H(int v, int s, int t) const;
  int B(int v, int s, int t) const;
};

struct BuiltModel {
  MilpModel model;
  VariableSpace vars;
};

/// Stable text tag of an arc, used in variable and row names.
std::string arc_tag(const DynamicNetwork& net, int arc);

VariableSpace build_variables(const PlanningInstance& inst, MilpModel& m);
void build_objective(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
void add_mass_balance(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
void add_concurrency(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
void add_transformation(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
void add_service_management(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
void add_flight_rules(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);
/// Terminal holdovers keep enough flight propellant to move the vehicle once
/// more; only used when the instance asks for it.
void add_terminal_reserve(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m);

BuiltModel build_model(const PlanningInstance& inst);

/// Vehicle presence injected at (vehicle, node, step): 1 or 0.
double presence_injection(const PlanningInstance& inst, int v, int node, int step, bool arrivals_only = false);

}  // namespace oos
