#include "support/micro.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "oos/angles.hpp"
#include "oos/trajectory.hpp"

namespace oos::testing {

std::filesystem::path source_dir() { return OOS_SOURCE_DIR; }

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Scenario micro_scenario(MicroPropulsion prop, double dry_mass, const std::map<std::string, double>& load,
                        const std::vector<ServiceTypeSpec>& services, bool tool_installed) {
  Scenario sc;
  sc.name = "micro";
  sc.commodities = {
      {"biprop", CommodityKind::continuous, 1.0, 180.0, true},
      {"xenon", CommodityKind::continuous, 1.0, 1115.0, true},
      {"monoprop", CommodityKind::continuous, 1.0, 230.0, false},
      {"T1", CommodityKind::tool, 100.0, 100000.0, false},
  };
  VehicleDesign d;
  d.id = "svc";
  d.cls = VehicleClass::servicer;
  d.dry_mass = dry_mass;
  d.capacities = {{"monoprop", 400.0}};
  if (tool_installed) d.tools_installed = {"T1"};
  d.operating_cost_per_day = 13000.0;
  d.manufacturing_cost = 75e6;
  if (prop != MicroPropulsion::low_thrust) {
    d.capacities["biprop"] = 1000.0;
    d.propulsion.push_back({PropulsionKind::high_thrust, 316.0, 0.0, "biprop", {2, 4}, {"phasing"}});
  }
  if (prop != MicroPropulsion::high_thrust) {
    d.capacities["xenon"] = 300.0;
    d.propulsion.push_back({PropulsionKind::low_thrust, 1790.0, 1.16, "xenon", {10, 14, 30, 34}, {"phasing"}});
  }
  sc.designs = {d};
  sc.services = services;
  sc.parking = {{"P", 0.0}};
  sc.fleet = {{"svc-1", "svc", "P", load}};
  sc.grid = {10, {2, 4}};
  validate(sc);
  return sc;
}

MicroInstance random_micro(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 7);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };

  const auto prop = static_cast<MicroPropulsion>(pick(3));
  std::map<std::string, double> load;
  if (prop != MicroPropulsion::low_thrust) load["biprop"] = std::round(uni(0, 1000));
  if (prop != MicroPropulsion::high_thrust) load["xenon"] = std::round(uni(0, 300));
  load["monoprop"] = std::round(uni(0, 400));

  const int n_types = 1 + pick(2);
  std::vector<ServiceTypeSpec> types;
  const double penalties[] = {0.0, 5e4, 2e5};
  const double durations[] = {8, 10, 20};
  const double windows[] = {6, 12, 25};
  const double demands[] = {0, 60, 150};
  for (int i = 0; i < n_types; ++i) {
    ServiceTypeSpec s;
    s.id = i == 0 ? "svc_a" : "svc_b";
    s.revenue = std::round(uni(5, 30)) * 1e6;
    s.delay_penalty_per_day = penalties[pick(3)];
    s.duration = durations[pick(3)];
    s.window = windows[pick(3)];
    s.occurrence = OccurrenceKind::deterministic;
    s.occurrence_days = 1000;
    if (double q = demands[pick(3)]; q > 0) s.commodity_demand["monoprop"] = q;
    s.required_tool = "T1";
    types.push_back(s);
  }
  const bool tool = uni(0, 1) < 0.85;

  MicroInstance mi;
  mi.scenario = micro_scenario(prop, std::round(uni(1500, 3500)), load, types, tool);
  const int n_cust = 1 + pick(2);
  for (int c = 0; c < n_cust; ++c) {
    double lon = uni(5, 150) * (uni(0, 1) < 0.5 ? -1 : 1);
    mi.catalog.push_back({"C" + std::to_string(c + 1), std::round(lon * 10) / 10});
  }
  const int n_needs = 1 + pick(2);
  for (int k = 0; k < n_needs; ++k) {
    const int s = pick(n_cust);
    const auto& spec = types[static_cast<std::size_t>(pick(n_types))];
    mi.needs.push_back(make_need(k, mi.catalog[static_cast<std::size_t>(s)], s, spec, std::round(uni(0, 22) * 10) / 10));
  }
  std::stable_sort(mi.needs.begin(), mi.needs.end(),
                   [](const ServiceNeed& a, const ServiceNeed& b) { return a.occurrence < b.occurrence; });
  mi.horizon = 34;
  return mi;
}

namespace {

double ht_coefficient(double from, double to, int q, const Scenario& sc, double isp) {
  TrajectoryQuery tq;
  tq.from_longitude = from;
  tq.to_longitude = to;
  tq.radius = sc.economics.geo_radius * 1e3;
  tq.time_of_flight = q * 86400.0;
  tq.isp = isp;
  tq.mass_min = 1;
  tq.mass_max = 2;
  tq.forbidden_radius = sc.economics.forbidden_radius * 1e3;
  return ht_model(tq).coefficient;
}

}  // namespace

MicroInstance mode_tradeoff_instance() {
  ServiceTypeSpec tight;
  tight.id = "tight";
  tight.revenue = 10e6;
  tight.delay_penalty_per_day = 1e5;
  tight.duration = 10;
  tight.window = 8;  // shorter than the 10-day low-thrust flight
  tight.occurrence_days = 1000;
  tight.required_tool = "T1";
  ServiceTypeSpec loose = tight;
  loose.id = "loose";
  loose.window = 60;

  const double dry = 4000.0;
  std::map<std::string, double> load{{"xenon", 300.0}, {"monoprop", 100.0}};
  // Biprop for a single cheapest hop P -> C1, plus 5 %.
  Scenario probe = micro_scenario(MicroPropulsion::multimodal, dry, load, {tight, loose});
  const double c1 = std::min(ht_coefficient(0, 40, 2, probe, 316), ht_coefficient(0, 40, 4, probe, 316));
  const double base = dry + 300 + 100 + 100;
  load["biprop"] = std::round(1.05 * c1 * base / (1 - c1));

  MicroInstance mi;
  mi.scenario = micro_scenario(MicroPropulsion::multimodal, dry, load, {tight, loose});
  mi.catalog = {{"C1", 40.0}, {"C2", -60.0}};
  mi.needs = {make_need(0, mi.catalog[0], 0, tight, 0.0), make_need(1, mi.catalog[1], 1, loose, 0.0)};
  mi.horizon = 60;
  return mi;
}

// ---------------------------------------------------------------------------

namespace {

struct Hop {
  int to = 0;
  int q = 0;
  std::string mode;
  std::string propellant;
  TrajectoryModel model;
  double mub = 0.0;
};

struct Search {
  const MicroInstance& mi;
  const Scenario& sc;
  const VehicleDesign& d;
  std::vector<int> days;                 // grid days
  std::vector<std::string> names;        // node 0 = P
  std::vector<double> lons;
  std::map<std::pair<int, int>, std::vector<Hop>> hops;  // (from, to) -> options
  std::map<std::string, std::size_t> kidx;
  double op = 0.0;

  OracleResult best;
  bool have = false;
  std::vector<OracleLeg> legs;
  long long paths = 0;

  int step_of(int day) const {
    auto it = std::find(days.begin(), days.end(), day);
    return it == days.end() ? -1 : static_cast<int>(it - days.begin());
  }
  int last() const { return static_cast<int>(days.size()) - 1; }

  double mass(const std::vector<double>& load) const {
    double m = d.dry_mass;
    for (const auto& [k, i] : kidx) m += load[i] * sc.commodity(k).unit_mass;
    return m;
  }

  void finish(double profit, const std::vector<int>& served) {
    ++paths;
    if (!have || profit > best.best + 1e-9) {
      have = true;
      best.best = profit;
      best.legs = legs;
      best.served = served;
    }
  }

  // Servicer free at node i, step t.  Only the parking node allows waiting.
  void free_at(int i, int t, std::vector<double> load, double profit, std::vector<int> served) {
    if (t == last()) {
      finish(profit, served);
      return;
    }
    if (i == 0) free_at(0, t + 1, load, profit - op * (days[static_cast<std::size_t>(t + 1)] - days[static_cast<std::size_t>(t)]), served);
    for (int j = 0; j < static_cast<int>(names.size()); ++j) {
      if (j == i) continue;
      auto it = hops.find({i, j});
      if (it == hops.end()) continue;
      for (const auto& h : it->second) {
        const int arr = step_of(days[static_cast<std::size_t>(t)] + h.q);
        if (arr < 0) continue;
        const double m0 = mass(load);
        if (m0 > h.mub + 1e-7) continue;
        const double burn = h.model.linear ? h.model.coefficient * m0 : interpolate(h.model.breakpoints, m0);
        const std::size_t p = kidx.at(h.propellant);
        if (load[p] < burn - 1e-7) continue;
        std::vector<double> after = load;
        after[p] -= burn;
        legs.push_back({days[static_cast<std::size_t>(t)], days[static_cast<std::size_t>(arr)], names[static_cast<std::size_t>(i)],
                        names[static_cast<std::size_t>(j)], h.mode, -1});
        const double cost = op * h.q;
        if (j == 0)
          free_at(0, arr, after, profit - cost, served);
        else
          arrive(j, arr, after, profit - cost, served);
        legs.pop_back();
      }
    }
  }

  // Arrival at customer j on step t: some need must start now.
  void arrive(int j, int t, const std::vector<double>& load, double profit, const std::vector<int>& served) {
    const int day = days[static_cast<std::size_t>(t)];
    for (const auto& n : mi.needs) {
      if (n.satellite != names[static_cast<std::size_t>(j)]) continue;
      if (std::find(served.begin(), served.end(), n.id) != served.end()) continue;
      // Start window: pattern days at or after the occurrence and before its close.
      int first = static_cast<int>(std::ceil(n.occurrence - 1e-9));
      while (std::find(pattern.begin(), pattern.end(), ((first % period) + period) % period) == pattern.end()) ++first;
      if (day < first || !(day < n.occurrence + n.window)) continue;
      std::vector<double> after = load;
      if (!n.tool.empty() && (!kidx.contains(n.tool) || after[kidx.at(n.tool)] < 1 - 1e-9)) continue;
      bool short_of = false;
      for (const auto& [k, amt] : n.demand) {
        if (!kidx.contains(k)) { short_of = true; break; }
        after[kidx.at(k)] += amt;  // amounts are negative
        if (after[kidx.at(k)] < -1e-7) short_of = true;
      }
      if (short_of) continue;
      double gain = n.revenue - n.delay_penalty * (day - first);
      int e = t;
      while (e <= last() && days[static_cast<std::size_t>(e)] < day + n.duration) ++e;
      const int stay_until = std::min(e, last());
      gain -= op * (days[static_cast<std::size_t>(stay_until)] - day);
      std::vector<int> s2 = served;
      s2.push_back(n.id);
      legs.back().need_id = n.id;
      if (e >= last())
        finish(profit + gain, s2);
      else
        free_at(j, e, after, profit + gain, s2);  // must fly out: no waiting at a customer
      legs.back().need_id = -1;
    }
  }

  int period = 10;
  std::vector<int> pattern;
};

}  // namespace

OracleResult enumerate(const MicroInstance& mi) {
  const Scenario& sc = mi.scenario;
  const auto& fm = sc.fleet.at(0);
  const auto& d = sc.design(fm.design);
  Search s{mi, sc, d, {}, {}, {}, {}, {}, d.operating_cost_per_day, {}, false, {}, 0, sc.grid.period, {}};
  s.pattern = sc.grid.offsets;
  s.pattern.push_back(0);
  for (int k = 0;; ++k) {
    bool any = false;
    for (int o : s.pattern) {
      int day = k * sc.grid.period + o;
      if (day <= mi.horizon) s.days.push_back(day), any = true;
    }
    if (!any) break;
  }
  std::sort(s.days.begin(), s.days.end());
  s.days.erase(std::unique(s.days.begin(), s.days.end()), s.days.end());

  s.names.push_back(sc.parking.at(0).name);
  s.lons.push_back(sc.parking.at(0).longitude);
  for (const auto& c : mi.catalog) {
    bool wanted = std::any_of(mi.needs.begin(), mi.needs.end(), [&](const ServiceNeed& n) { return n.satellite == c.name; });
    if (!wanted) continue;
    s.names.push_back(c.name);
    s.lons.push_back(c.longitude);
  }
  for (std::size_t k = 0; k < sc.commodities.size(); ++k) s.kidx[sc.commodities[k].id] = k;

  // Heaviest flyable mass: dry plus every capacity plus the installed tools.
  double m_max = d.dry_mass;
  for (const auto& [k, cap] : d.capacities) m_max += cap * sc.commodity(k).unit_mass;
  for (const auto& t : d.tools_installed) m_max += sc.commodity(t).unit_mass;

  for (int i = 0; i < static_cast<int>(s.names.size()); ++i)
    for (int j = 0; j < static_cast<int>(s.names.size()); ++j) {
      if (i == j) continue;
      for (const auto& mode : d.propulsion)
        for (int q : mode.flight_durations) {
          TrajectoryQuery tq;
          tq.from_longitude = s.lons[static_cast<std::size_t>(i)];
          tq.to_longitude = s.lons[static_cast<std::size_t>(j)];
          tq.radius = sc.economics.geo_radius * 1e3;
          tq.time_of_flight = q * 86400.0;
          tq.thrust = mode.thrust;
          tq.isp = mode.isp;
          tq.g0 = sc.economics.g0;
          tq.mu = sc.economics.mu_earth;
          tq.forbidden_radius = sc.economics.forbidden_radius * 1e3;
          tq.mass_min = d.dry_mass;
          tq.mass_max = m_max;
          tq.breakpoints = sc.solver.breakpoints;
          Hop h;
          h.to = j;
          h.q = q;
          h.mode = to_string(mode.kind);
          h.propellant = mode.propellant;
          try {
            h.model = mode.kind == PropulsionKind::high_thrust ? ht_model(tq) : lt_model(tq, tq.breakpoints);
          } catch (const InfeasibleTrajectory&) {
            continue;
          }
          h.mub = std::min(h.model.mass_upper_bound, m_max);
          if (h.mub < d.dry_mass) continue;
          s.hops[{i, j}].push_back(h);
        }
    }

  std::vector<double> load(sc.commodities.size(), 0.0);
  for (const auto& [k, q] : fm.initial_load) load[s.kidx.at(k)] = q;
  for (const auto& t : d.tools_installed) load[s.kidx.at(t)] = 1.0;
  s.free_at(0, 0, load, 0.0, {});
  if (!s.have) throw std::logic_error("oracle found no complete route");
  s.best.paths = s.paths;
  return s.best;
}

Solved solve_micro(const MicroInstance& mi, const Backend& backend, double gap) {
  Solved out;
  out.inst = build_instance(mi.scenario, mi.catalog, mi.needs, initial_state_from_fleet(mi.scenario, 0), 0, mi.horizon,
                            PluginRegistry::with_defaults());
  out.built = build_model(out.inst);
  SolveOptions o;
  o.mip_gap = gap;
  o.time_limit = 60;
  out.sol = backend.solve(out.built.model, o);
  return out;
}

}  // namespace oos::testing
