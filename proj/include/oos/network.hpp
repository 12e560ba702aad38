#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oos/angles.hpp"
#include "oos/scenario.hpp"
#include "oos/trajectory.hpp"

namespace oos {

enum class NodeKind { earth, parking, customer };

struct Node {
  NodeKind kind = NodeKind::parking;
  std::string name;
  double longitude = 0.0;  // deg east; unused for the Earth node
};

/// Earth first, then parking slots, then customers, in the order given.
struct NodeSet {
  std::vector<Node> nodes;

  static NodeSet make(const std::vector<ParkingSlot>& parking, const std::vector<CustomerSat>& customers);
  std::optional<int> find(const std::string& name) const;
  int earth() const { return 0; }
  bool is_orbital(int i) const { return nodes.at(static_cast<std::size_t>(i)).kind != NodeKind::earth; }
  NodeKind kind(int i) const { return nodes.at(static_cast<std::size_t>(i)).kind; }
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Periodic time steps {kT + o} restricted to [start, start + horizon].
struct TimeGrid {
  int period = 10;
  std::vector<int> offsets;
  int start = 0;
  int horizon = 0;
  std::vector<int> steps;  // days

  int size() const { return static_cast<int>(steps.size()); }
  int day(int idx) const { return steps.at(static_cast<std::size_t>(idx)); }
  int first_day() const { return steps.front(); }
  int last_day() const { return steps.back(); }
  /// Step index of `day`, or -1 when the day is not a step.
  int index_of(int day) const;
  /// Index of the first step at or after `day`, or size() when past the end.
  int index_at_or_after(double day) const;
  /// Forward holdover length; zero for the last step.
  int delta(int idx) const;
  /// Backward holdover length; zero for the first step.
  int delta_prev(int idx) const;
  /// True when `day` is on the infinite periodic pattern.
  bool on_pattern(int day) const;
  /// First pattern day at or after `day` (ignores the horizon).
  int snap_up(double day) const;
};

TimeGrid build_time_grid(int period, const std::vector<int>& offsets, int horizon, int start = 0);

/// One physical vehicle of the network.  Launchers come from launcher designs
/// and may fly once per launch opportunity.
struct NetVehicle {
  std::string id;
  std::string design;
  VehicleClass cls = VehicleClass::servicer;
  int home = -1;             // parking node of a depot
  bool earth_start = false;  // waits at the Earth node for a launch
};

/// Trajectory option r of a servicer: one propulsion mode with one plugin.
struct RouteOption {
  int mode = 0;
  std::string option;
  PropulsionKind kind = PropulsionKind::high_thrust;
  std::string propellant;
  std::vector<int> durations;
};

struct Holdover {
  int vehicle = 0;
  int node = 0;
  int step = 0;
  int next = -1;  // step index where the arc ends, -1 for the terminal holdover
  int delta = 0;  // days
};

inline constexpr int kLaunchOption = -1;

struct TransportArc {
  int vehicle = 0;
  int from = 0;
  int to = 0;
  int q = 0;                  // days
  int r = kLaunchOption;      // route option, kLaunchOption for launches
  int dep = 0;                // step index
  int arr = 0;                // step index
  int model = -1;             // index into DynamicNetwork::models, -1 for launches
  double mass_upper_bound = 0.0;
  bool launch() const { return r == kLaunchOption; }
};

/// Limits applied by the planner: which customer steps can receive or
/// release a servicer and where servicers may hold at customer nodes.
/// Nodes missing from a map are unrestricted.
struct ArcRestrictions {
  std::map<int, std::set<int>> customer_arrivals;
  std::map<int, std::set<int>> customer_departures;
  std::map<int, std::set<int>> customer_holdovers;
};

struct ExpandOptions {
  // Vehicles to place; empty means every fleet member plus one launcher per
  // launcher design, located as the scenario says.
  std::vector<NetVehicle> vehicles;
  ArcRestrictions restrictions;
  std::optional<int> breakpoints;  // overrides the scenario's solver setting
};

class DynamicNetwork {
 public:
  NodeSet nodes;
  TimeGrid grid;
  std::vector<NetVehicle> vehicles;
  std::vector<std::vector<RouteOption>> routes;  // per vehicle, indexed by r
  std::vector<Holdover> holdovers;
  std::vector<TransportArc> arcs;
  std::vector<TrajectoryModel> models;
  std::size_t model_cache_hits = 0;

  int holdover_at(int v, int node, int step) const;
  const std::vector<int>& arcs_out(int v, int node, int step) const;
  const std::vector<int>& arcs_in(int v, int node, int arrival_step) const;
  std::optional<int> find_arc(int v, int from, int to, int q, int r, int dep) const;
  std::optional<int> vehicle_index(const std::string& id) const;
  /// Total arc count per vehicle class, for reports.
  std::size_t count_arcs(VehicleClass cls) const;

  void index();

 private:
  std::size_t slot(int v, int node, int step) const;
  std::vector<int> hold_idx_;
  std::vector<std::vector<int>> out_, in_;
};

/// Builds holdovers, transport multiarcs and launch arcs.  Arc models come
/// from `registry` and are shared between arcs with equal phase geometry.
DynamicNetwork expand(const NodeSet& nodes, const TimeGrid& grid, const Scenario& scenario,
                      const PluginRegistry& registry, const ExpandOptions& options = {});

/// Route options of a design, in the order the r index uses.
std::vector<RouteOption> route_options(const VehicleDesign& design);

/// Heaviest total mass a vehicle of this design can fly at: dry mass plus the
/// largest load its capacities allow.
double max_total_mass(const VehicleDesign& design, const Scenario& scenario);

}  // namespace oos
