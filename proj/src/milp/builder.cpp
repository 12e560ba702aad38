#include "oos/milp/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Terms = std::vector<std::pair<int, double>>;

void push(Terms& t, int var, double c) {
  if (var >= 0 && c != 0.0) t.emplace_back(var, c);
}

std::string hold_tag(const Holdover& h) {
  return "v" + std::to_string(h.vehicle) + "_i" + std::to_string(h.node) + "_t" + std::to_string(h.step);
}

std::string vit(int v, int i, int t) {
  return "v" + std::to_string(v) + "_i" + std::to_string(i) + "_t" + std::to_string(t);
}

const VehicleDesign& design_of(const PlanningInstance& inst, int v) {
  return inst.scenario.design(inst.net.vehicles[static_cast<std::size_t>(v)].design);
}

bool is_servicer(const PlanningInstance& inst, int v) {
  return inst.net.vehicles[static_cast<std::size_t>(v)].cls == VehicleClass::servicer;
}

// Coefficient of flight propellant per kg of wet mass that covers every arc
// the route may fly: the steepest chord of its models.
double route_chord(const DynamicNetwork& net, int v, int r) {
  double c = 0.0;
  for (const auto& a : net.arcs) {
    if (a.vehicle != v || a.r != r || a.model < 0) continue;
    const auto& tm = net.models[static_cast<std::size_t>(a.model)];
    if (tm.linear) {
      c = std::max(c, tm.coefficient);
    } else if (!tm.breakpoints.empty()) {
      const auto& top = tm.breakpoints.back();
      if (top.m0 > 0.0) c = std::max(c, top.mp / top.m0);
    }
  }
  return c;
}

// A route departs from every grid residue if each pattern day has some
// duration that lands back on the pattern.
bool departs_everywhere(const TimeGrid& g, const RouteOption& ro) {
  std::vector<int> residues{0};
  residues.insert(residues.end(), g.offsets.begin(), g.offsets.end());
  for (int o : residues) {
    bool ok = false;
    for (int q : ro.durations) ok = ok || g.on_pattern(o + q);
    if (!ok) return false;
  }
  return true;
}

}  // namespace

double carry_capacity(const VehicleDesign& design, const CommoditySpec& k) {
  if (auto it = design.capacities.find(k.id); it != design.capacities.end()) return it->second;
  if (k.kind == CommodityKind::tool) return design.tools_installed.contains(k.id) ? 1.0 : 0.0;
  if (!design.payload_limit) return 0.0;
  return *design.payload_limit / k.unit_mass;
}

int VariableSpace::H(int v, int s, int t) const {
  auto it = h.find({v, s, t});
  return it == h.end() ? -1 : it->second;
}

int VariableSpace::B(int v, int s, int t) const {
  auto it = b.find({v, s, t});
  return it == b.end() ? -1 : it->second;
}

std::string arc_tag(const DynamicNetwork& net, int arc) {
  const auto& a = net.arcs[static_cast<std::size_t>(arc)];
  return "v" + std::to_string(a.vehicle) + "_i" + std::to_string(a.from) + "_j" + std::to_string(a.to) + "_q" +
         std::to_string(a.q) + (a.launch() ? std::string("_rL") : "_r" + std::to_string(a.r)) + "_t" +
         std::to_string(a.dep);
}

double presence_injection(const PlanningInstance& inst, int v, int node, int step, bool arrivals_only) {
  double p = 0.0;
  for (const auto& inj : inst.injections)
    if (inj.vehicle == v && inj.node == node && inj.step == step && (!arrivals_only || inj.arrival)) p += 1.0;
  return p;
}

VariableSpace build_variables(const PlanningInstance& inst, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int K = inst.commodity_count();
  const int S = net.grid.size();
  VariableSpace vs;

  for (std::size_t v = 0; v < net.vehicles.size(); ++v) {
    const auto& d = sc.design(net.vehicles[v].design);
    std::vector<double> c(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) c[static_cast<std::size_t>(k)] = carry_capacity(d, sc.commodities[static_cast<std::size_t>(k)]);
    vs.caps.push_back(std::move(c));
  }
  auto cap = [&](int v, int k) { return vs.caps[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)]; };
  auto kind_of = [&](int k) {
    return sc.commodities[static_cast<std::size_t>(k)].is_integral() ? VarKind::integer : VarKind::continuous;
  };

  for (const auto& ho : net.holdovers) {
    const std::string tag = hold_tag(ho);
    vs.yp.push_back(m.add_var("Yp_" + tag, VarKind::binary, 0, 1));
    vs.ym.push_back(m.add_var("Ym_" + tag, VarKind::continuous, 0, 1));
    std::vector<int> xp(static_cast<std::size_t>(K), -1), xm(static_cast<std::size_t>(K), -1);
    if (net.nodes.is_orbital(ho.node))
      for (int k = 0; k < K; ++k) {
        if (cap(ho.vehicle, k) <= 0.0) continue;
        const std::string kt = tag + "_k" + std::to_string(k);
        xp[static_cast<std::size_t>(k)] = m.add_var("Xp_" + kt, kind_of(k), 0, cap(ho.vehicle, k));
        xm[static_cast<std::size_t>(k)] = m.add_var("Xm_" + kt, kind_of(k), 0, cap(ho.vehicle, k));
      }
    vs.xp.push_back(std::move(xp));
    vs.xm.push_back(std::move(xm));
  }

  for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
    const auto& a = net.arcs[ai];
    const int arc = static_cast<int>(ai);
    const std::string tag = arc_tag(net, arc);
    const bool launcher = net.vehicles[static_cast<std::size_t>(a.vehicle)].cls == VehicleClass::launcher;
    vs.wp.push_back(m.add_var("Wp_" + tag, VarKind::binary, 0, 1));
    vs.wm.push_back(launcher ? -1 : m.add_var("Wm_" + tag, VarKind::continuous, 0, 1));
    std::vector<int> up(static_cast<std::size_t>(K), -1), um(static_cast<std::size_t>(K), -1);
    for (int k = 0; k < K; ++k) {
      if (cap(a.vehicle, k) <= 0.0) continue;
      const std::string kt = tag + "_k" + std::to_string(k);
      up[static_cast<std::size_t>(k)] = m.add_var("Up_" + kt, kind_of(k), 0, cap(a.vehicle, k));
      um[static_cast<std::size_t>(k)] = m.add_var("Um_" + kt, kind_of(k), 0, cap(a.vehicle, k));
    }
    vs.up.push_back(std::move(up));
    vs.um.push_back(std::move(um));

    int zp = -1, prop = -1, group = -1;
    if (!a.launch()) {
      const auto& ro = net.routes[static_cast<std::size_t>(a.vehicle)][static_cast<std::size_t>(a.r)];
      prop = static_cast<int>(*sc.commodity_index(ro.propellant));
      zp = m.add_var("Z_" + tag, VarKind::continuous, 0, a.mass_upper_bound);
      if (a.model < 0) throw std::logic_error("arc " + tag + " has no trajectory model");
      const auto& tm = net.models[static_cast<std::size_t>(a.model)];
      if (!tm.linear) {
        Sos2Group g;
        g.arc = arc;
        const std::size_t n = tm.breakpoints.size();
        for (std::size_t i = 0; i < n; ++i)
          g.lambdas.push_back(m.add_var("L_" + tag + "_n" + std::to_string(i), VarKind::continuous, 0, 1));
        for (std::size_t i = 0; i + 1 < n; ++i)
          g.selectors.push_back(m.add_var("S_" + tag + "_n" + std::to_string(i), VarKind::binary, 0, 1));
        group = static_cast<int>(m.sos2.size());
        m.sos2.push_back(std::move(g));
      }
    }
    vs.z.push_back(zp);
    vs.flight_propellant.push_back(prop);
    vs.sos.push_back(group);
  }

  // Assignment and coverage.
  for (std::size_t si = 0; si < inst.needs.size(); ++si) {
    const auto& wn = inst.needs[si];
    const int s = static_cast<int>(si);
    std::vector<int> cands;
    if (wn.pinned_vehicle)
      cands.push_back(*wn.pinned_vehicle);
    else
      for (std::size_t v = 0; v < net.vehicles.size(); ++v)
        if (net.vehicles[v].cls == VehicleClass::servicer) cands.push_back(static_cast<int>(v));

    for (int v : cands) {
      if (!wn.need.tool.empty()) {
        auto k = sc.commodity_index(wn.need.tool);
        if (!k || cap(v, static_cast<int>(*k)) <= 0.0) continue;
      }
      const std::string vs_tag = "v" + std::to_string(v) + "_s" + std::to_string(wn.need.id);
      if (wn.coverage_only) {
        for (int t : wn.fixed_cover) vs.b[{v, s, t}] = m.add_var("B_" + vs_tag + "_t" + std::to_string(t), VarKind::binary, 1, 1);
        continue;
      }
      for (int tau : wn.window) {
        const bool pinned = wn.pinned_vehicle.has_value();
        if (!pinned) {
          const bool arrives = !net.arcs_in(v, wn.node, tau).empty() ||
                               presence_injection(inst, v, wn.node, tau, true) > 0.0;
          if (!arrives) continue;
          const int e = net.grid.index_at_or_after(net.grid.day(tau) + wn.need.duration);
          if (e < S - 1 && net.arcs_out(v, wn.node, e).empty()) continue;
        }
        vs.h[{v, s, tau}] = m.add_var("H_" + vs_tag + "_t" + std::to_string(tau), VarKind::binary, pinned ? 1 : 0, 1);
        for (int t : wn.beta.at(tau))
          if (!vs.b.contains({v, s, t}))
            vs.b[{v, s, t}] = m.add_var("B_" + vs_tag + "_t" + std::to_string(t), VarKind::binary, 0, 1);
      }
    }
  }

  // Reserve route: one that can leave from every grid residue, else the
  // route whose propellant is cheapest.
  for (std::size_t v = 0; v < net.vehicles.size(); ++v) {
    int pick = -1;
    const auto& routes = net.routes[v];
    for (std::size_t r = 0; r < routes.size() && pick < 0; ++r)
      if (departs_everywhere(net.grid, routes[r])) pick = static_cast<int>(r);
    if (pick < 0 && !routes.empty()) {
      double best = kInf;
      for (std::size_t r = 0; r < routes.size(); ++r) {
        double price = sc.commodity(routes[r].propellant).purchase_cost;
        if (price < best) best = price, pick = static_cast<int>(r);
      }
    }
    vs.reserve_route.push_back(pick);
    vs.reserve_coefficient.push_back(pick < 0 ? 0.0 : route_chord(net, static_cast<int>(v), pick));
  }
  return vs;
}

void build_objective(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int K = inst.commodity_count();

  for (const auto& [key, var] : vs.h) {
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    m.add_objective("revenues", var, wn.need.revenue);
    m.add_objective("delay", var, wn.need.delay_penalty * (net.grid.day(key[2]) - wn.tau_s));
  }

  for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
    const auto& a = net.arcs[ai];
    const auto& d = design_of(inst, a.vehicle);
    if (a.launch()) {
      m.add_objective("launch", vs.wp[ai], sc.economics.launch_cost_per_kg * d.dry_mass);
      m.add_objective("pdm", vs.wp[ai], d.manufacturing_cost);
      for (int k = 0; k < K; ++k) {
        const int u = vs.up[ai][static_cast<std::size_t>(k)];
        if (u < 0) continue;
        const auto& ck = sc.commodities[static_cast<std::size_t>(k)];
        m.add_objective("launch", u, sc.economics.launch_cost_per_kg * ck.unit_mass);
        m.add_objective("pdm", u, ck.purchase_cost);
      }
    } else if (is_servicer(inst, a.vehicle)) {
      m.add_objective("servicer_ops", vs.wp[ai], d.operating_cost_per_day * a.q);
    }
  }

  for (std::size_t hi = 0; hi < net.holdovers.size(); ++hi) {
    const auto& ho = net.holdovers[hi];
    if (!net.nodes.is_orbital(ho.node)) continue;
    const auto& veh = net.vehicles[static_cast<std::size_t>(ho.vehicle)];
    const double cost = design_of(inst, ho.vehicle).operating_cost_per_day * ho.delta;
    if (veh.cls == VehicleClass::depot) m.add_objective("depot_ops", vs.yp[hi], cost);
    if (veh.cls == VehicleClass::servicer) m.add_objective("servicer_ops", vs.yp[hi], cost);
  }
}

void add_mass_balance(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int K = inst.commodity_count();
  const int S = net.grid.size();
  const int V = static_cast<int>(net.vehicles.size());

  // Commodity demand of H at (vehicle, node, step, commodity).
  std::map<std::array<int, 4>, Terms> demand;
  for (const auto& [key, var] : vs.h) {
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    for (const auto& [k, amount] : wn.need.demand) {
      auto idx = sc.commodity_index(k);
      if (!idx) throw std::invalid_argument("need " + std::to_string(wn.need.id) + " demands unknown commodity " + k);
      demand[{key[0], wn.node, key[2], static_cast<int>(*idx)}].emplace_back(var, amount);
    }
  }
  std::map<std::array<int, 4>, double> injected;  // (vehicle or -1, node, step, k)
  for (const auto& inj : inst.injections)
    for (int k = 0; k < K; ++k)
      if (inj.amounts[static_cast<std::size_t>(k)] != 0.0)
        injected[{inj.vehicle, inj.node, inj.step, k}] += inj.amounts[static_cast<std::size_t>(k)];

  // Net outflow terms of vehicle v at (i, t) for commodity k.
  auto flow_terms = [&](Terms& terms, int v, int i, int t, int k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    if (int h = net.holdover_at(v, i, t); h >= 0) push(terms, vs.xp[static_cast<std::size_t>(h)][ks], 1.0);
    if (t > 0)
      if (int h = net.holdover_at(v, i, t - 1); h >= 0) push(terms, vs.xm[static_cast<std::size_t>(h)][ks], -1.0);
    for (int a : net.arcs_out(v, i, t)) push(terms, vs.up[static_cast<std::size_t>(a)][ks], 1.0);
    for (int a : net.arcs_in(v, i, t)) push(terms, vs.um[static_cast<std::size_t>(a)][ks], -1.0);
  };

  for (int i = 0; i < net.nodes.size(); ++i) {
    const NodeKind nk = net.nodes.kind(i);
    if (nk == NodeKind::earth) continue;
    for (int t = 0; t < S; ++t)
      for (int k = 0; k < K; ++k) {
        if (nk == NodeKind::customer) {
          for (int v = 0; v < V; ++v) {
            if (!is_servicer(inst, v)) continue;
            Terms terms;
            flow_terms(terms, v, i, t, k);
            auto dit = demand.find({v, i, t, k});
            if (dit != demand.end())
              for (const auto& [var, amt] : dit->second) push(terms, var, -amt);
            auto iit = injected.find({v, i, t, k});
            const double rhs = iit == injected.end() ? 0.0 : iit->second;
            if (terms.empty() && rhs == 0.0) continue;
            m.add_row("eq7", "eq7_" + vit(v, i, t) + "_k" + std::to_string(k), std::move(terms), Sense::eq, rhs);
          }
        } else {
          Terms terms;
          double rhs = 0.0;
          for (int v = -1; v < V; ++v) {
            if (v >= 0) flow_terms(terms, v, i, t, k);
            if (auto iit = injected.find({v, i, t, k}); iit != injected.end()) rhs += iit->second;
          }
          if (terms.empty() && rhs == 0.0) continue;
          m.add_row("eq9", "eq9_i" + std::to_string(i) + "_t" + std::to_string(t) + "_k" + std::to_string(k),
                    std::move(terms), Sense::eq, rhs);
        }
      }
  }

  // Finite Earth supply per launch step.
  const int earth = net.nodes.earth();
  for (const auto& [kid, supply] : sc.earth_supply) {
    const auto k = static_cast<std::size_t>(*sc.commodity_index(kid));
    for (int t = 0; t < S; ++t) {
      Terms terms;
      for (int v = 0; v < V; ++v)
        for (int a : net.arcs_out(v, earth, t)) push(terms, vs.up[static_cast<std::size_t>(a)][k], 1.0);
      if (!terms.empty())
        m.add_row("eq10", "eq10_t" + std::to_string(t) + "_k" + std::to_string(k), std::move(terms), Sense::le, supply);
    }
  }

  // Vehicle conservation; at the Earth node inflow is capped by the supply of
  // vehicles instead.
  for (int v = 0; v < V; ++v) {
    const bool launcher = net.vehicles[static_cast<std::size_t>(v)].cls == VehicleClass::launcher;
    for (int i = 0; i < net.nodes.size(); ++i)
      for (int t = 0; t < S; ++t) {
        Terms terms;
        if (int h = net.holdover_at(v, i, t); h >= 0) push(terms, vs.yp[static_cast<std::size_t>(h)], 1.0);
        if (t > 0)
          if (int h = net.holdover_at(v, i, t - 1); h >= 0) push(terms, vs.ym[static_cast<std::size_t>(h)], -1.0);
        for (int a : net.arcs_out(v, i, t)) push(terms, vs.wp[static_cast<std::size_t>(a)], 1.0);
        for (int a : net.arcs_in(v, i, t)) push(terms, vs.wm[static_cast<std::size_t>(a)], -1.0);
        if (i == earth) {
          if (terms.empty()) continue;
          double sigma = launcher ? 1.0 : presence_injection(inst, v, i, t);
          m.add_row("eq12", "eq12_" + vit(v, i, t), std::move(terms), Sense::le, sigma);
        } else {
          if (launcher) continue;
          const double rhs = presence_injection(inst, v, i, t);
          if (terms.empty() && rhs == 0.0) continue;
          m.add_row("eq11", "eq11_" + vit(v, i, t), std::move(terms), Sense::eq, rhs);
        }
      }
  }
}

void add_concurrency(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int K = inst.commodity_count();
  auto rows = [&](const std::string& tag, int v, int flag, const std::vector<int>& load) {
    const auto& d = design_of(inst, v);
    Terms payload;
    for (int k = 0; k < K; ++k) {
      const int x = load[static_cast<std::size_t>(k)];
      if (x < 0) continue;
      m.add_row("eq13", "eq13_" + tag + "_k" + std::to_string(k), {{x, 1.0}, {flag, -vs.caps[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)]}},
                Sense::le, 0.0);
      push(payload, x, sc.commodities[static_cast<std::size_t>(k)].unit_mass);
    }
    if (d.payload_limit && !payload.empty()) {
      payload.emplace_back(flag, -*d.payload_limit);
      m.add_row("eq14", "eq14_" + tag, std::move(payload), Sense::le, 0.0);
    }
  };
  for (std::size_t h = 0; h < net.holdovers.size(); ++h)
    rows(hold_tag(net.holdovers[h]), net.holdovers[h].vehicle, vs.yp[h], vs.xp[h]);
  for (std::size_t a = 0; a < net.arcs.size(); ++a)
    rows(arc_tag(net, static_cast<int>(a)), net.arcs[a].vehicle, vs.wp[a], vs.up[a]);
}

void add_transformation(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int K = inst.commodity_count();

  for (std::size_t h = 0; h < net.holdovers.size(); ++h) {
    const auto& ho = net.holdovers[h];
    const auto& d = design_of(inst, ho.vehicle);
    const std::string tag = hold_tag(ho);
    m.add_row("eq15", "eq15_" + tag, {{vs.ym[h], 1.0}, {vs.yp[h], -1.0}}, Sense::eq, 0.0);
    std::optional<std::size_t> sk;
    if (d.station_keeping) sk = sc.commodity_index(d.station_keeping->commodity);
    for (int k = 0; k < K; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      if (vs.xp[h][ks] < 0) continue;
      Terms t{{vs.xm[h][ks], 1.0}, {vs.xp[h][ks], -1.0}};
      if (sk && *sk == ks) push(t, vs.yp[h], d.station_keeping->rate_per_day * ho.delta);
      m.add_row("eq15", "eq15_" + tag + "_k" + std::to_string(k), std::move(t), Sense::eq, 0.0);
    }
  }

  for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
    const auto& a = net.arcs[ai];
    const std::string tag = arc_tag(net, static_cast<int>(ai));
    if (vs.wm[ai] >= 0) m.add_row("eq16", "eq16_" + tag, {{vs.wm[ai], 1.0}, {vs.wp[ai], -1.0}}, Sense::eq, 0.0);
    const int prop = vs.flight_propellant[ai];
    const TrajectoryModel* tm = a.model >= 0 ? &net.models[static_cast<std::size_t>(a.model)] : nullptr;
    for (int k = 0; k < K; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      if (vs.up[ai][ks] < 0) continue;
      if (k == prop && !tm->linear) continue;  // tied to the lambda weights below
      Terms t{{vs.um[ai][ks], 1.0}, {vs.up[ai][ks], -1.0}};
      if (k == prop) push(t, vs.z[ai], tm->coefficient);
      m.add_row("eq16", "eq16_" + tag + "_k" + std::to_string(k), std::move(t), Sense::eq, 0.0);
    }
    if (vs.z[ai] < 0) continue;

    Terms total{{vs.z[ai], 1.0}};
    for (int k = 0; k < K; ++k)
      push(total, vs.up[ai][static_cast<std::size_t>(k)], -sc.commodities[static_cast<std::size_t>(k)].unit_mass);
    push(total, vs.wp[ai], -design_of(inst, a.vehicle).dry_mass);
    m.add_row("eq20", "eq20_" + tag, std::move(total), Sense::eq, 0.0);

    if (vs.sos[ai] < 0) continue;
    if (prop < 0 || vs.up[ai][static_cast<std::size_t>(prop)] < 0)
      throw std::logic_error("arc " + tag + " cannot carry its flight propellant");
    const auto& g = m.sos2[static_cast<std::size_t>(vs.sos[ai])];
    const auto& bp = tm->breakpoints;
    Terms e17{{vs.wp[ai], -1.0}}, e18{{vs.z[ai], -1.0}},
        e19{{vs.up[ai][static_cast<std::size_t>(prop)], -1.0}, {vs.um[ai][static_cast<std::size_t>(prop)], 1.0}};
    for (std::size_t i = 0; i < g.lambdas.size(); ++i) {
      push(e17, g.lambdas[i], 1.0);
      push(e18, g.lambdas[i], bp[i].m0);
      push(e19, g.lambdas[i], bp[i].mp);
    }
    m.add_row("eq17", "eq17_" + tag, std::move(e17), Sense::eq, 0.0);
    m.add_row("eq18", "eq18_" + tag, std::move(e18), Sense::eq, 0.0);
    m.add_row("eq19", "eq19_" + tag, std::move(e19), Sense::eq, 0.0);

    Terms sel{{vs.wp[ai], -1.0}};
    for (int s : g.selectors) push(sel, s, 1.0);
    m.add_row("sos2", "sos2_" + tag + "_sum", std::move(sel), Sense::eq, 0.0);
    const std::size_t n = g.lambdas.size();
    for (std::size_t i = 0; i < n; ++i) {
      Terms adj{{g.lambdas[i], 1.0}};
      if (i > 0) push(adj, g.selectors[i - 1], -1.0);
      if (i + 1 < n) push(adj, g.selectors[i], -1.0);
      m.add_row("sos2", "sos2_" + tag + "_n" + std::to_string(i), std::move(adj), Sense::le, 0.0);
    }
  }
}

void add_service_management(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int S = net.grid.size();

  std::map<int, Terms> by_need;
  for (const auto& [key, var] : vs.h) by_need[key[1]].emplace_back(var, 1.0);
  for (auto& [s, terms] : by_need)
    m.add_row("eq21", "eq21_s" + std::to_string(inst.needs[static_cast<std::size_t>(s)].need.id), std::move(terms),
              Sense::le, 1.0);

  for (const auto& [key, var] : vs.b) {
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    if (wn.coverage_only) continue;
    Terms terms{{var, 1.0}};
    for (const auto& [tau, cover] : wn.beta)
      if (std::find(cover.begin(), cover.end(), key[2]) != cover.end()) push(terms, vs.H(key[0], key[1], tau), -1.0);
    m.add_row("eq22", "eq22_v" + std::to_string(key[0]) + "_s" + std::to_string(wn.need.id) + "_t" + std::to_string(key[2]),
              std::move(terms), Sense::eq, 0.0);
  }

  // Coverage per (node, step) and per (vehicle, node, step).
  std::map<std::array<int, 2>, Terms> at_site;
  std::map<std::array<int, 3>, Terms> by_vehicle;
  std::map<std::array<int, 4>, Terms> by_tool;  // (v, node, step, tool commodity)
  for (const auto& [key, var] : vs.b) {
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    at_site[{wn.node, key[2]}].emplace_back(var, 1.0);
    by_vehicle[{key[0], wn.node, key[2]}].emplace_back(var, 1.0);
    if (!wn.need.tool.empty())
      by_tool[{key[0], wn.node, key[2], static_cast<int>(*sc.commodity_index(wn.need.tool))}].emplace_back(var, 1.0);
  }
  for (auto& [key, terms] : at_site)
    m.add_row("eq23", "eq23_i" + std::to_string(key[0]) + "_t" + std::to_string(key[1]), std::move(terms), Sense::le,
              1.0);

  for (std::size_t h = 0; h < net.holdovers.size(); ++h) {
    const auto& ho = net.holdovers[h];
    if (net.nodes.kind(ho.node) != NodeKind::customer) continue;
    Terms terms{{vs.yp[h], 1.0}};
    if (auto it = by_vehicle.find({ho.vehicle, ho.node, ho.step}); it != by_vehicle.end())
      for (const auto& [var, c] : it->second) push(terms, var, -c);
    const bool terminal = ho.step == S - 1;
    m.add_row("eq24", "eq24_" + hold_tag(ho), std::move(terms), terminal ? Sense::ge : Sense::eq, 0.0);
  }
  for (const auto& [key, vars] : by_vehicle)
    if (net.holdover_at(key[0], key[1], key[2]) < 0)
      throw std::logic_error("coverage at " + vit(key[0], key[1], key[2]) + " without a holdover");

  for (auto& [key, terms] : by_tool) {
    const int h = net.holdover_at(key[0], key[1], key[2]);
    const int x = vs.xp[static_cast<std::size_t>(h)][static_cast<std::size_t>(key[3])];
    for (auto& t : terms) t.second = -1.0;
    push(terms, x, 1.0);
    m.add_row("eq25", "eq25_" + vit(key[0], key[1], key[2]) + "_k" + std::to_string(key[3]), std::move(terms),
              Sense::ge, 0.0);
  }
}

void add_flight_rules(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    if (vs.z[a] < 0) continue;
    m.add_row("eq26", "eq26_" + arc_tag(net, static_cast<int>(a)),
              {{vs.z[a], 1.0}, {vs.wp[a], -net.arcs[a].mass_upper_bound}}, Sense::le, 0.0);
  }

  std::map<std::array<int, 3>, Terms> starts;  // (v, node, step)
  for (const auto& [key, var] : vs.h)
    starts[{key[0], inst.needs[static_cast<std::size_t>(key[1])].node, key[2]}].emplace_back(var, -1.0);
  const int S = net.grid.size();
  for (std::size_t v = 0; v < net.vehicles.size(); ++v) {
    if (!is_servicer(inst, static_cast<int>(v))) continue;
    for (int i = 0; i < net.nodes.size(); ++i) {
      if (net.nodes.kind(i) != NodeKind::customer) continue;
      for (int t = 0; t < S; ++t) {
        Terms terms;
        for (int a : net.arcs_in(static_cast<int>(v), i, t)) push(terms, vs.wp[static_cast<std::size_t>(a)], 1.0);
        if (auto it = starts.find({static_cast<int>(v), i, t}); it != starts.end())
          terms.insert(terms.end(), it->second.begin(), it->second.end());
        const double rhs = -presence_injection(inst, static_cast<int>(v), i, t, true);
        if (terms.empty() && rhs == 0.0) continue;
        m.add_row("eq27", "eq27_" + vit(static_cast<int>(v), i, t), std::move(terms), Sense::eq, rhs);
      }
    }
  }
}

void add_terminal_reserve(const PlanningInstance& inst, const VariableSpace& vs, MilpModel& m) {
  const auto& net = inst.net;
  const auto& sc = inst.scenario;
  const int S = net.grid.size();
  for (std::size_t h = 0; h < net.holdovers.size(); ++h) {
    const auto& ho = net.holdovers[h];
    const auto v = static_cast<std::size_t>(ho.vehicle);
    if (ho.step != S - 1 || !net.nodes.is_orbital(ho.node) || vs.reserve_route[v] < 0) continue;
    const double c = vs.reserve_coefficient[v];
    if (c <= 0.0) continue;
    const auto& ro = net.routes[v][static_cast<std::size_t>(vs.reserve_route[v])];
    const auto p = *sc.commodity_index(ro.propellant);
    if (vs.xp[h][p] < 0) continue;
    Terms terms{{vs.xp[h][p], 1.0}};
    push(terms, vs.yp[h], -c * design_of(inst, ho.vehicle).dry_mass);
    for (std::size_t k = 0; k < vs.xp[h].size(); ++k) push(terms, vs.xp[h][k], -c * sc.commodities[k].unit_mass);
    m.add_row("reserve", "reserve_" + hold_tag(ho), std::move(terms), Sense::ge, 0.0);
  }
}

BuiltModel build_model(const PlanningInstance& inst) {
  BuiltModel out;
  out.vars = build_variables(inst, out.model);
  build_objective(inst, out.vars, out.model);
  add_mass_balance(inst, out.vars, out.model);
  add_concurrency(inst, out.vars, out.model);
  add_transformation(inst, out.vars, out.model);
  add_service_management(inst, out.vars, out.model);
  add_flight_rules(inst, out.vars, out.model);
  if (inst.terminal_reserve) add_terminal_reserve(inst, out.vars, out.model);
  return out;
}

}  // namespace oos
