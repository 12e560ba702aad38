#include "oos/milp/instance.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace oos {

InitialState initial_state_from_fleet(const Scenario& scenario, int day) {
  InitialState st;
  st.day = day;
  for (const auto& f : scenario.fleet) {
    auto load = f.initial_load;
    // Installed tools travel with a vehicle already in orbit.
    if (f.pre_deployed())
      for (const auto& t : scenario.design(f.design).tools_installed) load.try_emplace(t, 1.0);
    st.injections.push_back({f.id, f.location, day, false, load});
  }
  return st;
}

namespace {

int step_or_throw(const TimeGrid& g, int day, const std::string& what) {
  int idx = g.index_of(day);
  if (idx < 0) throw std::invalid_argument(what + ": day " + std::to_string(day) + " is not a step of the window");
  return idx;
}

}  // namespace

PlanningInstance build_instance(const Scenario& scenario, const std::vector<CustomerSat>& catalog,
                                const std::vector<ServiceNeed>& visible, const InitialState& state, int start_day,
                                int horizon_days, const PluginRegistry& registry, const InstanceOptions& options) {
  PlanningInstance inst;
  inst.scenario = scenario;
  inst.terminal_reserve = options.terminal_reserve;
  const TimeGrid grid = build_time_grid(scenario.grid.period, scenario.grid.offsets, horizon_days, start_day);

  std::set<std::string> parking_names;
  for (const auto& p : scenario.parking) parking_names.insert(p.name);

  std::map<int, const PinnedStart*> pinned_by_need;
  for (const auto& p : state.starts) pinned_by_need[p.need_id] = &p;

  // Satellites entering the network.
  std::set<std::string> wanted;
  std::vector<std::pair<ServiceNeed, std::vector<int>>> kept;
  for (const auto& n : visible) {
    std::vector<int> w;
    if (auto p = pinned_by_need.find(n.id); p != pinned_by_need.end())
      w = {step_or_throw(grid, p->second->day, "pinned start of need " + std::to_string(n.id))};
    else
      w = build_window(n, grid);
    if (w.empty()) {
      inst.warnings.push_back("need " + std::to_string(n.id) + " has an empty service window; dropped");
      continue;
    }
    wanted.insert(n.satellite);
    kept.emplace_back(n, std::move(w));
  }
  for (const auto& c : state.coverage) wanted.insert(c.satellite);
  for (const auto& inj : state.injections)
    if (inj.node != "earth" && !parking_names.contains(inj.node)) wanted.insert(inj.node);

  std::vector<CustomerSat> customers;
  for (const auto& sat : catalog)
    if (wanted.contains(sat.name)) customers.push_back(sat);
  for (const auto& name : wanted)
    if (std::none_of(customers.begin(), customers.end(), [&](const CustomerSat& s) { return s.name == name; }))
      throw std::invalid_argument("satellite \"" + name + "\" is not in the catalog");
  const NodeSet nodes = NodeSet::make(scenario.parking, customers);

  std::vector<NetVehicle> vehicles;
  for (const auto& f : scenario.fleet) {
    const auto& d = scenario.design(f.design);
    NetVehicle v{f.id, f.design, d.cls, -1, false};
    if (d.cls == VehicleClass::depot) v.home = *nodes.find(f.location);
    for (const auto& inj : state.injections)
      if (inj.vehicle == f.id && inj.node == "earth") v.earth_start = true;
    vehicles.push_back(v);
  }
  for (const auto& d : scenario.designs)
    if (d.cls == VehicleClass::launcher) vehicles.push_back({d.id, d.id, VehicleClass::launcher, -1, false});
  auto vehicle_idx = [&](const std::string& id) {
    for (std::size_t v = 0; v < vehicles.size(); ++v)
      if (vehicles[v].id == id) return static_cast<int>(v);
    throw std::invalid_argument("unknown vehicle \"" + id + "\"");
  };

  for (auto& [n, w] : kept) {
    WindowNeed wn;
    wn.node = *nodes.find(n.satellite);
    wn.tau_s = earliest_start(n, grid);
    wn.beta = build_beta(n, grid, w);
    if (auto p = pinned_by_need.find(n.id); p != pinned_by_need.end()) wn.pinned_vehicle = vehicle_idx(p->second->vehicle);
    wn.window = std::move(w);
    wn.need = std::move(n);
    inst.needs.push_back(std::move(wn));
  }
  for (const auto& c : state.coverage) {
    WindowNeed wn;
    wn.need.id = c.need_id;
    wn.need.satellite = c.satellite;
    wn.need.tool = c.tool;
    wn.need.type = "in-progress";
    wn.node = *nodes.find(c.satellite);
    wn.coverage_only = true;
    wn.pinned_vehicle = vehicle_idx(c.vehicle);
    for (int t = 0; t < grid.size(); ++t)
      if (grid.day(t) >= c.from_day && grid.day(t) < c.to_day) wn.fixed_cover.push_back(t);
    if (!wn.fixed_cover.empty()) inst.needs.push_back(std::move(wn));
  }

  ExpandOptions eo;
  eo.vehicles = vehicles;
  eo.breakpoints = options.breakpoints;
  auto& rs = eo.restrictions;
  for (int i = 0; i < nodes.size(); ++i)
    if (nodes.kind(i) == NodeKind::customer) {
      rs.customer_arrivals[i];
      rs.customer_departures[i];
      rs.customer_holdovers[i];
    }
  auto end_step = [&](int tau, double duration) { return grid.index_at_or_after(grid.day(tau) + duration); };
  for (const auto& wn : inst.needs) {
    if (wn.coverage_only) {
      rs.customer_holdovers[wn.node].insert(wn.fixed_cover.begin(), wn.fixed_cover.end());
      int e = wn.fixed_cover.back() + 1;
      if (e < grid.size()) rs.customer_departures[wn.node].insert(e);
      continue;
    }
    for (const auto& [tau, cover] : wn.beta) {
      rs.customer_arrivals[wn.node].insert(tau);
      rs.customer_holdovers[wn.node].insert(cover.begin(), cover.end());
      int e = end_step(tau, wn.need.duration);
      if (e < grid.size()) rs.customer_departures[wn.node].insert(e);
    }
  }

  for (const auto& inj : state.injections) {
    NodeInjection ni;
    ni.vehicle = inj.vehicle.empty() ? -1 : vehicle_idx(inj.vehicle);
    auto node = nodes.find(inj.node);
    if (!node) throw std::invalid_argument("injection at unknown node \"" + inj.node + "\"");
    ni.node = *node;
    ni.step = step_or_throw(grid, inj.day, "injection of " + (inj.vehicle.empty() ? "cargo" : inj.vehicle));
    ni.arrival = inj.arrival;
    ni.amounts.assign(scenario.commodities.size(), 0.0);
    for (const auto& [k, amount] : inj.commodities) {
      auto idx = scenario.commodity_index(k);
      if (!idx) throw std::invalid_argument("injection of unknown commodity \"" + k + "\"");
      ni.amounts[*idx] = amount;
    }
    if (nodes.kind(ni.node) == NodeKind::customer) rs.customer_departures[ni.node].insert(ni.step);
    inst.injections.push_back(std::move(ni));
  }

  inst.net = expand(nodes, grid, scenario, registry, eo);
  return inst;
}

}  // namespace oos
