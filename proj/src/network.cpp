#include "oos/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oos {

NodeSet NodeSet::make(const std::vector<ParkingSlot>& parking, const std::vector<CustomerSat>& customers) {
  NodeSet s;
  s.nodes.push_back({NodeKind::earth, "earth", 0.0});
  for (const auto& p : parking) s.nodes.push_back({NodeKind::parking, p.name, normalize_longitude(p.longitude)});
  for (const auto& c : customers) s.nodes.push_back({NodeKind::customer, c.name, c.longitude});
  std::set<std::string> seen;
  for (const auto& n : s.nodes)
    if (!seen.insert(n.name).second) throw std::invalid_argument("duplicate node name \"" + n.name + "\"");
  return s;
}

std::optional<int> NodeSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

int TimeGrid::index_of(int d) const {
  auto it = std::lower_bound(steps.begin(), steps.end(), d);
  if (it == steps.end() || *it != d) return -1;
  return static_cast<int>(it - steps.begin());
}

int TimeGrid::index_at_or_after(double d) const {
  auto it = std::lower_bound(steps.begin(), steps.end(), d,
                             [](int step, double value) { return static_cast<double>(step) < value; });
  return static_cast<int>(it - steps.begin());
}

int TimeGrid::delta(int idx) const {
  if (idx + 1 >= size()) return 0;
  return day(idx + 1) - day(idx);
}

int TimeGrid::delta_prev(int idx) const {
  if (idx <= 0) return 0;
  return day(idx) - day(idx - 1);
}

bool TimeGrid::on_pattern(int d) const {
  int rem = ((d % period) + period) % period;
  return rem == 0 || std::binary_search(offsets.begin(), offsets.end(), rem);
}

int TimeGrid::snap_up(double d) const {
  int k = static_cast<int>(std::ceil(d - 1e-9));
  while (!on_pattern(k)) ++k;
  return k;
}

TimeGrid build_time_grid(int period, const std::vector<int>& offsets, int horizon, int start) {
  if (period <= 0) throw std::invalid_argument("grid period must be > 0");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i] <= 0 || offsets[i] >= period)
      throw std::invalid_argument("grid offsets must lie inside (0, period)");
    if (i > 0 && offsets[i] <= offsets[i - 1]) throw std::invalid_argument("grid offsets must strictly increase");
  }
  if (horizon < period) throw std::invalid_argument("horizon shorter than one period");
  TimeGrid g;
  g.period = period;
  g.offsets = offsets;
  g.start = start;
  g.horizon = horizon;
  int first_period = start >= 0 ? start / period : -((-start + period - 1) / period);
  for (int k = first_period;; ++k) {
    int base = k * period;
    if (base > start + horizon) break;
    for (int o = -1; o < static_cast<int>(offsets.size()); ++o) {
      int d = base + (o < 0 ? 0 : offsets[static_cast<std::size_t>(o)]);
      if (d >= start && d <= start + horizon) g.steps.push_back(d);
    }
  }
  if (g.steps.empty()) throw std::invalid_argument("grid has no steps");
  return g;
}

std::vector<RouteOption> route_options(const VehicleDesign& design) {
  std::vector<RouteOption> out;
  for (std::size_t m = 0; m < design.propulsion.size(); ++m) {
    const auto& mode = design.propulsion[m];
    for (const auto& opt : mode.trajectory_options)
      out.push_back({static_cast<int>(m), opt, mode.kind, mode.propellant, mode.flight_durations});
  }
  return out;
}

double max_total_mass(const VehicleDesign& design, const Scenario& scenario) {
  double caps = 0.0;
  for (const auto& [k, cap] : design.capacities) caps += cap * scenario.commodity(k).unit_mass;
  // Installed tools without an explicit limit ride along as one unit each.
  double tools = 0.0;
  for (const auto& t : design.tools_installed)
    if (!design.capacities.contains(t)) tools += scenario.commodity(t).unit_mass;
  double load = caps;
  if (design.payload_limit) {
    bool uncapped = std::any_of(scenario.commodities.begin(), scenario.commodities.end(), [&](const CommoditySpec& c) {
      return c.kind != CommodityKind::tool && !design.capacities.contains(c.id);
    });
    load = uncapped ? *design.payload_limit : std::min(caps, *design.payload_limit);
  }
  return design.dry_mass + load + tools;
}

std::size_t DynamicNetwork::slot(int v, int node, int step) const {
  return (static_cast<std::size_t>(v) * static_cast<std::size_t>(nodes.size()) + static_cast<std::size_t>(node)) *
             static_cast<std::size_t>(grid.size()) +
         static_cast<std::size_t>(step);
}

void DynamicNetwork::index() {
  const std::size_t n = vehicles.size() * static_cast<std::size_t>(nodes.size()) * static_cast<std::size_t>(grid.size());
  hold_idx_.assign(n, -1);
  out_.assign(n, {});
  in_.assign(n, {});
  for (std::size_t h = 0; h < holdovers.size(); ++h) {
    const auto& x = holdovers[h];
    hold_idx_[slot(x.vehicle, x.node, x.step)] = static_cast<int>(h);
  }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& x = arcs[a];
    out_[slot(x.vehicle, x.from, x.dep)].push_back(static_cast<int>(a));
    in_[slot(x.vehicle, x.to, x.arr)].push_back(static_cast<int>(a));
  }
}

int DynamicNetwork::holdover_at(int v, int node, int step) const {
  if (step < 0 || step >= grid.size()) return -1;
  return hold_idx_[slot(v, node, step)];
}

const std::vector<int>& DynamicNetwork::arcs_out(int v, int node, int step) const {
  return out_.at(slot(v, node, step));
}

const std::vector<int>& DynamicNetwork::arcs_in(int v, int node, int arrival_step) const {
  return in_.at(slot(v, node, arrival_step));
}

std::optional<int> DynamicNetwork::find_arc(int v, int from, int to, int q, int r, int dep) const {
  for (int a : arcs_out(v, from, dep)) {
    const auto& x = arcs[static_cast<std::size_t>(a)];
    if (x.to == to && x.q == q && x.r == r) return a;
  }
  return std::nullopt;
}

std::optional<int> DynamicNetwork::vehicle_index(const std::string& id) const {
  for (std::size_t v = 0; v < vehicles.size(); ++v)
    if (vehicles[v].id == id) return static_cast<int>(v);
  return std::nullopt;
}

std::size_t DynamicNetwork::count_arcs(VehicleClass cls) const {
  return static_cast<std::size_t>(std::count_if(arcs.begin(), arcs.end(), [&](const TransportArc& a) {
    return vehicles[static_cast<std::size_t>(a.vehicle)].cls == cls;
  }));
}

namespace {

bool duration_aligned(const TimeGrid& g, int q) {
  std::vector<int> residues{0};
  residues.insert(residues.end(), g.offsets.begin(), g.offsets.end());
  for (int o : residues)
    if (g.on_pattern(o + q)) return true;
  return false;
}

std::vector<NetVehicle> default_vehicles(const NodeSet& nodes, const Scenario& sc) {
  std::vector<NetVehicle> out;
  for (const auto& f : sc.fleet) {
    const auto& d = sc.design(f.design);
    NetVehicle v{f.id, f.design, d.cls, -1, f.location == "earth"};
    if (d.cls == VehicleClass::depot) {
      auto n = nodes.find(f.location);
      if (!n) throw std::invalid_argument("depot " + f.id + " sits at unknown node " + f.location);
      v.home = *n;
    }
    out.push_back(v);
  }
  for (const auto& d : sc.designs)
    if (d.cls == VehicleClass::launcher) out.push_back({d.id, d.id, VehicleClass::launcher, -1, false});
  return out;
}

bool allowed(const std::map<int, std::set<int>>& m, int node, int step) {
  auto it = m.find(node);
  return it == m.end() || it->second.contains(step);
}

}  // namespace

DynamicNetwork expand(const NodeSet& nodes, const TimeGrid& grid, const Scenario& sc,
                      const PluginRegistry& registry, const ExpandOptions& options) {
  DynamicNetwork net;
  net.nodes = nodes;
  net.grid = grid;
  net.vehicles = options.vehicles.empty() ? default_vehicles(nodes, sc) : options.vehicles;
  const int breakpoints = options.breakpoints.value_or(sc.solver.breakpoints);
  const auto& rs = options.restrictions;
  const int S = grid.size();
  const double geo_m = sc.economics.geo_radius * 1e3;

  std::vector<int> parking, customers, orbital;
  for (int i = 0; i < nodes.size(); ++i) {
    if (nodes.kind(i) == NodeKind::parking) parking.push_back(i);
    if (nodes.kind(i) == NodeKind::customer) customers.push_back(i);
    if (nodes.is_orbital(i)) orbital.push_back(i);
  }

  std::vector<int> launch_steps;
  const int q0 = sc.economics.launch_duration;
  for (int t = 0; t < S; ++t) {
    int d = grid.day(t);
    if (d % sc.economics.launcher_cadence == 0 && grid.index_of(d + q0) >= 0) launch_steps.push_back(t);
  }

  ModelCache cache;
  for (std::size_t vi = 0; vi < net.vehicles.size(); ++vi) {
    const int v = static_cast<int>(vi);
    const auto& veh = net.vehicles[vi];
    const auto& design = sc.design(veh.design);
    net.routes.push_back(veh.cls == VehicleClass::servicer ? route_options(design) : std::vector<RouteOption>{});

    auto add_holdovers = [&](int node, bool restrict_customer) {
      for (int t = 0; t < S; ++t) {
        if (restrict_customer && t + 1 < S && !allowed(rs.customer_holdovers, node, t)) continue;
        net.holdovers.push_back({v, node, t, t + 1 < S ? t + 1 : -1, grid.delta(t)});
      }
    };

    switch (veh.cls) {
      case VehicleClass::depot:
        if (veh.home < 0) throw std::invalid_argument("depot " + veh.id + " has no home node");
        add_holdovers(veh.home, false);
        break;
      case VehicleClass::launcher:
        for (int t : launch_steps)
          for (int j : parking)
            net.arcs.push_back({v, nodes.earth(), j, q0, kLaunchOption, t, grid.index_of(grid.day(t) + q0), -1,
                                max_total_mass(design, sc)});
        break;
      case VehicleClass::servicer: {
        if (veh.earth_start) {
          add_holdovers(nodes.earth(), false);
          for (int t : launch_steps)
            for (int j : parking)
              net.arcs.push_back({v, nodes.earth(), j, q0, kLaunchOption, t, grid.index_of(grid.day(t) + q0), -1,
                                  max_total_mass(design, sc)});
        }
        for (int i : orbital) add_holdovers(i, nodes.kind(i) == NodeKind::customer);

        const double m_min = design.dry_mass;
        const double m_max = max_total_mass(design, sc);
        const auto& ropts = net.routes.back();
        for (std::size_t r = 0; r < ropts.size(); ++r) {
          const auto& ro = ropts[r];
          const auto& mode = design.propulsion[static_cast<std::size_t>(ro.mode)];
          if (!registry.contains(ro.kind, ro.option))
            throw std::invalid_argument("design " + design.id + ": no trajectory plugin " + to_string(ro.kind) +
                                        "/" + ro.option);
          for (int q : ro.durations) {
            if (!duration_aligned(grid, q))
              throw std::invalid_argument("design " + design.id + ": flight duration " + std::to_string(q) +
                                          " never lands on the time grid");
            for (int i : orbital)
              for (int j : orbital) {
                if (i == j) continue;
                const auto& ni = nodes.nodes[static_cast<std::size_t>(i)];
                const auto& nj = nodes.nodes[static_cast<std::size_t>(j)];
                int model = -2;
                for (int t = 0; t < S; ++t) {
                  int arr = grid.index_of(grid.day(t) + q);
                  if (arr < 0) continue;
                  if (ni.kind == NodeKind::customer && !allowed(rs.customer_departures, i, t)) continue;
                  if (nj.kind == NodeKind::customer && !allowed(rs.customer_arrivals, j, arr)) continue;
                  if (model == -2) {
                    double alpha = phase_angle(ni.longitude, nj.longitude);
                    ModelCache::Key key{design.id, static_cast<int>(r), q, std::llround(alpha * 1e9)};
                    model = cache.get_or_compute(key, [&] {
                      TrajectoryQuery tq;
                      tq.from_longitude = ni.longitude;
                      tq.to_longitude = nj.longitude;
                      tq.radius = geo_m;
                      tq.time_of_flight = q * 86400.0;
                      tq.thrust = mode.thrust;
                      tq.isp = mode.isp;
                      tq.g0 = sc.economics.g0;
                      tq.mu = sc.economics.mu_earth;
                      tq.forbidden_radius = sc.economics.forbidden_radius * 1e3;
                      tq.mass_min = m_min;
                      tq.mass_max = m_max;
                      tq.breakpoints = breakpoints;
                      return registry.evaluate(ro.kind, ro.option, tq);
                    });
                  }
                  if (model < 0) break;
                  const auto& tm = cache.at(model);
                  double mub = std::min(tm.mass_upper_bound, m_max);
                  if (mub < m_min) break;
                  net.arcs.push_back({v, i, j, q, static_cast<int>(r), t, arr, model, mub});
                }
              }
          }
        }
        break;
      }
    }
  }
  net.model_cache_hits = cache.hits();
  net.models = cache.release();
  net.index();
  return net;
}

}  // namespace oos
