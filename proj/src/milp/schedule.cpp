#include "oos/milp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oos {

namespace {

int kind_rank(const std::string& k) {
  if (k == "service_end") return 0;
  if (k == "arrive") return 1;
  if (k == "service_start") return 2;
  if (k == "refuel" || k == "transfer") return 3;
  return 4;
}

}  // namespace

Schedule extract_schedule(const PlanningInstance& inst, const BuiltModel& built, const Solution& sol, double tol) {
  if (!sol.has_point()) throw std::runtime_error("solution has no values to extract");
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const auto& vs = built.vars;
  const auto& x = sol.values;
  for (std::size_t j = 0; j < built.model.cols.size(); ++j) {
    const auto& c = built.model.cols[j];
    if (c.kind != VarKind::continuous && std::abs(x[j] - std::round(x[j])) > tol)
      throw std::runtime_error("variable " + c.name + " is fractional (" + std::to_string(x[j]) + ")");
  }
  auto on = [&](int var) { return var >= 0 && x[static_cast<std::size_t>(var)] > 0.5; };
  auto val = [&](int var) { return var < 0 ? 0.0 : x[static_cast<std::size_t>(var)]; };
  const int K = inst.commodity_count();
  auto node_name = [&](int i) { return net.nodes.nodes[static_cast<std::size_t>(i)].name; };

  Schedule s;
  s.status = to_string(sol.status);
  s.objective = built.model.objective_value(x);
  s.gap = sol.gap;
  for (const auto& c : objective_components()) s.components[c] = built.model.component_value(c, x);

  for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
    if (!on(vs.wp[ai])) continue;
    const auto& a = net.arcs[ai];
    const auto& veh = net.vehicles[static_cast<std::size_t>(a.vehicle)];
    ScheduleEvent dep;
    dep.day = net.grid.day(a.dep);
    dep.vehicle = veh.id;
    dep.node = node_name(a.from);
    dep.to = node_name(a.to);
    dep.q = a.q;
    dep.r = a.r;
    if (a.launch()) {
      dep.kind = "launch";
      dep.mode = "launch";
      dep.commodity = "cargo";
      for (int k = 0; k < K; ++k) dep.amount += sc.commodities[static_cast<std::size_t>(k)].unit_mass * val(vs.up[ai][static_cast<std::size_t>(k)]);
    } else {
      const auto& ro = net.routes[static_cast<std::size_t>(a.vehicle)][static_cast<std::size_t>(a.r)];
      dep.kind = "depart";
      dep.mode = to_string(ro.kind) + "/" + ro.option;
      dep.commodity = ro.propellant;
      const auto p = static_cast<std::size_t>(vs.flight_propellant[ai]);
      dep.amount = val(vs.up[ai][p]) - val(vs.um[ai][p]);
    }
    ScheduleEvent arr;
    arr.day = net.grid.day(a.arr);
    arr.vehicle = veh.id;
    arr.kind = "arrive";
    arr.node = node_name(a.to);
    arr.q = a.q;
    arr.r = a.r;
    arr.mode = dep.mode;
    s.events.push_back(dep);
    s.events.push_back(arr);
  }

  std::map<int, NeedOutcome> outcomes;
  for (const auto& wn : inst.needs) {
    if (wn.coverage_only) continue;
    NeedOutcome o;
    o.need_id = wn.need.id;
    o.satellite = wn.need.satellite;
    o.type = wn.need.type;
    outcomes[wn.need.id] = o;
  }
  for (const auto& [key, var] : vs.h) {
    if (!on(var)) continue;
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    const auto& veh = net.vehicles[static_cast<std::size_t>(key[0])];
    auto& o = outcomes[wn.need.id];
    o.served = true;
    o.vehicle = veh.id;
    o.start_day = net.grid.day(key[2]);
    o.revenue = wn.need.revenue;
    o.delay_cost = wn.need.delay_penalty * (o.start_day - wn.tau_s);
    ScheduleEvent st;
    st.day = o.start_day;
    st.vehicle = veh.id;
    st.kind = "service_start";
    st.node = wn.need.satellite;
    st.mode = wn.need.type;
    st.need_id = wn.need.id;
    ScheduleEvent en = st;
    en.kind = "service_end";
    en.day = static_cast<int>(std::ceil(o.start_day + wn.need.duration));
    s.events.push_back(st);
    s.events.push_back(en);
  }
  for (auto& [id, o] : outcomes) s.outcomes.push_back(o);

  // Commodity exchanges of servicers at parking nodes.
  std::map<std::array<int, 4>, double> injected;
  for (const auto& inj : inst.injections)
    for (int k = 0; k < K; ++k) injected[{inj.vehicle, inj.node, inj.step, k}] += inj.amounts[static_cast<std::size_t>(k)];
  for (std::size_t v = 0; v < net.vehicles.size(); ++v) {
    if (net.vehicles[v].cls != VehicleClass::servicer) continue;
    const int vi = static_cast<int>(v);
    for (int i = 0; i < net.nodes.size(); ++i) {
      if (net.nodes.kind(i) != NodeKind::parking) continue;
      for (int t = 0; t < net.grid.size(); ++t)
        for (int k = 0; k < K; ++k) {
          const auto ks = static_cast<std::size_t>(k);
          double got = 0.0;
          if (int h = net.holdover_at(vi, i, t); h >= 0) got += val(vs.xp[static_cast<std::size_t>(h)][ks]);
          if (t > 0)
            if (int h = net.holdover_at(vi, i, t - 1); h >= 0) got -= val(vs.xm[static_cast<std::size_t>(h)][ks]);
          for (int a : net.arcs_out(vi, i, t)) got += val(vs.up[static_cast<std::size_t>(a)][ks]);
          for (int a : net.arcs_in(vi, i, t)) got -= val(vs.um[static_cast<std::size_t>(a)][ks]);
          if (auto it = injected.find({vi, i, t, k}); it != injected.end()) got -= it->second;
          if (std::abs(got) <= 1e-6) continue;
          const auto& ck = sc.commodities[ks];
          ScheduleEvent e;
          e.day = net.grid.day(t);
          e.vehicle = net.vehicles[v].id;
          e.kind = ck.propellant && got > 0 ? "refuel" : "transfer";
          e.node = node_name(i);
          e.commodity = ck.id;
          e.amount = got;
          s.events.push_back(e);
        }
    }
  }

  std::stable_sort(s.events.begin(), s.events.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
    if (a.day != b.day) return a.day < b.day;
    if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
    if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
    if (a.node != b.node) return a.node < b.node;
    return a.commodity < b.commodity;
  });
  return s;
}

std::vector<std::string> check_path_continuity(const Schedule& s) {
  std::vector<std::string> breaks;
  std::map<std::string, std::string> at;  // vehicle -> node of last arrival
  for (const auto& e : s.events) {
    if (e.kind == "arrive") {
      at[e.vehicle] = e.node;
    } else if (e.kind == "depart" || e.kind == "launch") {
      auto it = at.find(e.vehicle);
      if (it != at.end() && it->second != e.node)
        breaks.push_back(e.vehicle + " departs " + e.node + " on day " + std::to_string(e.day) + " but arrived at " +
                         it->second);
      at[e.vehicle] = "(in flight)";
    }
  }
  return breaks;
}

nlohmann::json to_json(const Schedule& s) {
  nlohmann::json j;
  j["status"] = s.status;
  j["objective"] = s.objective;
  j["gap"] = s.gap;
  j["components"] = s.components;
  j["events"] = nlohmann::json::array();
  for (const auto& e : s.events) {
    nlohmann::json ej{{"day", e.day}, {"vehicle", e.vehicle}, {"kind", e.kind}, {"node", e.node}};
    if (!e.to.empty()) ej["to"] = e.to;
    if (e.kind == "launch" || e.kind == "depart" || e.kind == "arrive") {
      ej["q"] = e.q;
      ej["r"] = e.r;
      ej["mode"] = e.mode;
    }
    if (!e.commodity.empty()) {
      ej["commodity"] = e.commodity;
      ej["amount"] = e.amount;
    }
    if (e.need_id >= 0) {
      ej["need_id"] = e.need_id;
      ej["service"] = e.mode;
    }
    j["events"].push_back(ej);
  }
  j["outcomes"] = nlohmann::json::array();
  for (const auto& o : s.outcomes) {
    nlohmann::json oj{{"need_id", o.need_id}, {"satellite", o.satellite}, {"type", o.type}, {"served", o.served}};
    if (o.served) {
      oj["vehicle"] = o.vehicle;
      oj["start_day"] = o.start_day;
      oj["revenue"] = o.revenue;
      oj["delay_cost"] = o.delay_cost;
    }
    j["outcomes"].push_back(oj);
  }
  return j;
}

std::string export_schedule_json(const Schedule& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace oos
