#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oos/demand.hpp"
#include "oos/network.hpp"
#include "oos/scenario.hpp"
#include "oos/trajectory.hpp"

namespace oos {

/// A vehicle or load entering the planning window from outside: the fleet's
/// starting positions, or arrivals of arcs flown in an earlier window.
struct Injection {
  std::string vehicle;  // empty for cargo without a vehicle (expended launcher)
  std::string node;
  int day = 0;
  bool arrival = false;  // true when the vehicle lands at `day` on an earlier arc
  std::map<std::string, double> commodities;

  bool operator==(const Injection&) const = default;
};

/// A committed service start; its assignment variable is fixed to one.
struct PinnedStart {
  int need_id = 0;
  std::string vehicle;
  int day = 0;

  bool operator==(const PinnedStart&) const = default;
};

/// A service already under way: the servicer must stay on site until
/// `to_day` (exclusive).
struct PinnedCoverage {
  int need_id = 0;
  std::string vehicle;
  std::string satellite;
  std::string tool;
  int from_day = 0;
  int to_day = 0;

  bool operator==(const PinnedCoverage&) const = default;
};

struct InitialState {
  int day = 0;
  std::vector<Injection> injections;
  std::vector<PinnedStart> starts;
  std::vector<PinnedCoverage> coverage;

  bool operator==(const InitialState&) const = default;
};

/// Fleet positions and loads of the scenario at `day`.
InitialState initial_state_from_fleet(const Scenario& scenario, int day = 0);

/// A need as seen by one planning window.
struct WindowNeed {
  ServiceNeed need;
  int node = 0;
  std::vector<int> window;                // start step indices
  int tau_s = 0;                          // delay reference day
  std::map<int, std::vector<int>> beta;   // start step -> covered steps
  std::optional<int> pinned_vehicle;      // for pinned starts and coverage
  bool coverage_only = false;
  std::vector<int> fixed_cover;           // covered steps of a coverage pin
};

/// Injection resolved to network indices; `amounts` is per commodity index.
struct NodeInjection {
  int vehicle = -1;
  int node = 0;
  int step = 0;
  bool arrival = false;
  std::vector<double> amounts;
};

struct InstanceOptions {
  std::optional<int> breakpoints;
  bool terminal_reserve = false;
};

/// Everything the model builder needs for one window.
struct PlanningInstance {
  Scenario scenario;
  DynamicNetwork net;
  std::vector<WindowNeed> needs;
  std::vector<NodeInjection> injections;
  bool terminal_reserve = false;
  std::vector<std::string> warnings;

  int commodity_count() const { return static_cast<int>(scenario.commodities.size()); }
};

/// Builds the network over [start_day, start_day + horizon_days] with every
/// satellite that has a visible need or hosts a vehicle, then resolves windows,
/// coverage tables, pins and injections.
PlanningInstance build_instance(const Scenario& scenario, const std::vector<CustomerSat>& catalog,
                                const std::vector<ServiceNeed>& visible, const InitialState& state, int start_day,
                                int horizon_days, const PluginRegistry& registry, const InstanceOptions& options = {});

}  // namespace oos
