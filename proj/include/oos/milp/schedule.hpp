#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "oos/milp/builder.hpp"
#include "oos/milp/solve.hpp"

namespace oos {

struct ScheduleEvent {
  int day = 0;
  std::string vehicle;
  // launch, depart, arrive, service_start, service_end, refuel, transfer
  std::string kind;
  std::string node;
  std::string to;        // destination of launch/depart events
  int q = 0;             // flight duration, days
  int r = -1;            // route option, -1 for launches
  std::string mode;      // "high_thrust/phasing", "launch", ...
  std::string commodity;
  double amount = 0.0;   // propellant burnt, cargo moved, or delivered
  int need_id = -1;
};

struct NeedOutcome {
  int need_id = 0;
  std::string satellite;
  std::string type;
  bool served = false;
  std::string vehicle;
  int start_day = -1;
  double revenue = 0.0;
  double delay_cost = 0.0;
};

struct Schedule {
  std::string status;
  double objective = 0.0;
  double gap = 0.0;
  std::map<std::string, double> components;  // revenues and the five cost terms
  std::vector<ScheduleEvent> events;         // sorted by (day, vehicle, kind rank)
  std::vector<NeedOutcome> outcomes;         // sorted by need id
};

/// Binary and integer values must be within `tol` of an integer; the
/// extraction throws std::runtime_error otherwise.
Schedule extract_schedule(const PlanningInstance& inst, const BuiltModel& built, const Solution& sol,
                          double tol = 1e-6);

/// Per vehicle, each arrival node must equal the node of the next departure.
/// Returns human-readable breaks; empty when every path is contiguous.
std::vector<std::string> check_path_continuity(const Schedule& s);

nlohmann::json to_json(const Schedule& s);
/// Pretty JSON with sorted keys.
std::string export_schedule_json(const Schedule& s);

}  // namespace oos
