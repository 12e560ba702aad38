#include "oos/milp/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oos/text.hpp"

namespace oos {

std::string AuditReport::summary(std::size_t max_lines) const {
  if (ok()) return "audit: no violations";
  std::ostringstream os;
  os << "audit: " << violations.size() << " violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < max_lines; ++i)
    os << "\n  " << violations[i].family << ' ' << violations[i].key << " residual "
       << format_double(violations[i].residual);
  return os.str();
}

namespace {

std::string vit(int v, int i, int t) {
  return "v" + std::to_string(v) + "_i" + std::to_string(i) + "_t" + std::to_string(t);
}

class Auditor {
 public:
  Auditor(const PlanningInstance& inst, const BuiltModel& built, const std::vector<double>& x, double tol)
      : inst_(inst), net_(inst.net), sc_(inst.scenario), vs_(built.vars), model_(built.model), x_(x), tol_(tol),
        K_(inst.commodity_count()), S_(inst.net.grid.size()), V_(static_cast<int>(inst.net.vehicles.size())) {}

  AuditReport run() {
    variables();
    commodity_flow();
    vehicle_flow();
    concurrency();
    transformation();
    services();
    flights();
    if (inst_.terminal_reserve) reserve();
    return std::move(report_);
  }

 private:
  double val(int var) const { return var < 0 ? 0.0 : x_[static_cast<std::size_t>(var)]; }
  double xp(int h, int k) const { return h < 0 ? 0.0 : val(vs_.xp[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)]); }
  double xm(int h, int k) const { return h < 0 ? 0.0 : val(vs_.xm[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)]); }
  double up(int a, int k) const { return val(vs_.up[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)]); }
  double um(int a, int k) const { return val(vs_.um[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)]); }
  double mass(int k) const { return sc_.commodities[static_cast<std::size_t>(k)].unit_mass; }
  const VehicleDesign& design(int v) const { return sc_.design(net_.vehicles[static_cast<std::size_t>(v)].design); }
  VehicleClass cls(int v) const { return net_.vehicles[static_cast<std::size_t>(v)].cls; }

  void eq(const std::string& fam, const std::string& key, double lhs, double rhs) {
    if (std::abs(lhs - rhs) > tol_) report_.violations.push_back({fam, key, lhs - rhs});
  }
  void le(const std::string& fam, const std::string& key, double lhs, double rhs) {
    if (lhs - rhs > tol_) report_.violations.push_back({fam, key, lhs - rhs});
  }

  void variables() {
    for (std::size_t j = 0; j < model_.cols.size(); ++j) {
      const auto& c = model_.cols[j];
      const double v = x_[j];
      if (v < c.lb - tol_ || v > c.ub + tol_) report_.violations.push_back({"bounds", c.name, v});
      if (c.kind != VarKind::continuous && std::abs(v - std::round(v)) > tol_)
        report_.violations.push_back({"integrality", c.name, v - std::round(v)});
    }
  }

  // Outflow minus inflow of commodity k for vehicle v at (i, t).
  double net_out(int v, int i, int t, int k) const {
    double f = xp(net_.holdover_at(v, i, t), k);
    if (t > 0) f -= xm(net_.holdover_at(v, i, t - 1), k);
    for (int a : net_.arcs_out(v, i, t)) f += up(a, k);
    for (int a : net_.arcs_in(v, i, t)) f -= um(a, k);
    return f;
  }

  void commodity_flow() {
    std::map<std::array<int, 4>, double> inj, dem;
    for (const auto& n : inst_.injections)
      for (int k = 0; k < K_; ++k) inj[{n.vehicle, n.node, n.step, k}] += n.amounts[static_cast<std::size_t>(k)];
    for (const auto& [key, var] : vs_.h) {
      const auto& wn = inst_.needs[static_cast<std::size_t>(key[1])];
      for (const auto& [kid, amt] : wn.need.demand)
        dem[{key[0], wn.node, key[2], static_cast<int>(*sc_.commodity_index(kid))}] += amt * val(var);
    }
    auto get = [](const std::map<std::array<int, 4>, double>& m, std::array<int, 4> k) {
      auto it = m.find(k);
      return it == m.end() ? 0.0 : it->second;
    };
    for (int i = 0; i < net_.nodes.size(); ++i) {
      const NodeKind nk = net_.nodes.kind(i);
      if (nk == NodeKind::earth) continue;
      for (int t = 0; t < S_; ++t)
        for (int k = 0; k < K_; ++k) {
          const std::string key = "i" + std::to_string(i) + "_t" + std::to_string(t) + "_k" + std::to_string(k);
          if (nk == NodeKind::customer) {
            for (int v = 0; v < V_; ++v) {
              if (cls(v) != VehicleClass::servicer) continue;
              eq("eq7", "v" + std::to_string(v) + "_" + key, net_out(v, i, t, k),
                 get(inj, {v, i, t, k}) + get(dem, {v, i, t, k}));
            }
          } else {
            double lhs = 0.0, rhs = get(inj, {-1, i, t, k});
            for (int v = 0; v < V_; ++v) {
              lhs += net_out(v, i, t, k);
              rhs += get(inj, {v, i, t, k}) + get(dem, {v, i, t, k});
            }
            eq("eq9", key, lhs, rhs);
          }
        }
    }
    for (const auto& [kid, supply] : sc_.earth_supply) {
      const int k = static_cast<int>(*sc_.commodity_index(kid));
      for (int t = 0; t < S_; ++t) {
        double out = 0.0;
        for (int v = 0; v < V_; ++v)
          for (int a : net_.arcs_out(v, net_.nodes.earth(), t)) out += up(a, k);
        le("eq10", "t" + std::to_string(t) + "_k" + std::to_string(k), out, supply);
      }
    }
  }

  void vehicle_flow() {
    for (int v = 0; v < V_; ++v)
      for (int i = 0; i < net_.nodes.size(); ++i)
        for (int t = 0; t < S_; ++t) {
          double f = 0.0;
          if (int h = net_.holdover_at(v, i, t); h >= 0) f += val(vs_.yp[static_cast<std::size_t>(h)]);
          if (t > 0)
            if (int h = net_.holdover_at(v, i, t - 1); h >= 0) f -= val(vs_.ym[static_cast<std::size_t>(h)]);
          for (int a : net_.arcs_out(v, i, t)) f += val(vs_.wp[static_cast<std::size_t>(a)]);
          for (int a : net_.arcs_in(v, i, t)) f -= val(vs_.wm[static_cast<std::size_t>(a)]);
          const double p = presence_injection(inst_, v, i, t);
          if (i == net_.nodes.earth())
            le("eq12", vit(v, i, t), f, cls(v) == VehicleClass::launcher ? 1.0 : p);
          else if (cls(v) != VehicleClass::launcher)
            eq("eq11", vit(v, i, t), f, p);
        }
  }

  void concurrency_of(const std::string& tag, int v, double flag, const std::vector<int>& load) {
    double payload = 0.0;
    for (int k = 0; k < K_; ++k) {
      const double q = val(load[static_cast<std::size_t>(k)]);
      le("eq13", tag + "_k" + std::to_string(k), q, carry_capacity(design(v), sc_.commodities[static_cast<std::size_t>(k)]) * flag);
      payload += mass(k) * q;
    }
    if (design(v).payload_limit) le("eq14", tag, payload, *design(v).payload_limit * flag);
  }

  void concurrency() {
    for (std::size_t h = 0; h < net_.holdovers.size(); ++h) {
      const auto& ho = net_.holdovers[h];
      concurrency_of(vit(ho.vehicle, ho.node, ho.step), ho.vehicle, val(vs_.yp[h]), vs_.xp[h]);
    }
    for (std::size_t a = 0; a < net_.arcs.size(); ++a)
      concurrency_of(arc_tag(net_, static_cast<int>(a)), net_.arcs[a].vehicle, val(vs_.wp[a]), vs_.up[a]);
  }

  void transformation() {
    for (std::size_t h = 0; h < net_.holdovers.size(); ++h) {
      const auto& ho = net_.holdovers[h];
      const auto& d = design(ho.vehicle);
      const std::string tag = vit(ho.vehicle, ho.node, ho.step);
      const double y = val(vs_.yp[h]);
      eq("eq15", tag, val(vs_.ym[h]), y);
      if (!net_.nodes.is_orbital(ho.node)) continue;
      for (int k = 0; k < K_; ++k) {
        double burn = 0.0;
        if (d.station_keeping && d.station_keeping->commodity == sc_.commodities[static_cast<std::size_t>(k)].id)
          burn = d.station_keeping->rate_per_day * ho.delta * y;
        eq("eq15", tag + "_k" + std::to_string(k), xm(static_cast<int>(h), k), xp(static_cast<int>(h), k) - burn);
      }
    }

    for (std::size_t ai = 0; ai < net_.arcs.size(); ++ai) {
      const auto& a = net_.arcs[ai];
      const int arc = static_cast<int>(ai);
      const std::string tag = arc_tag(net_, arc);
      const double w = val(vs_.wp[ai]);
      if (cls(a.vehicle) != VehicleClass::launcher) eq("eq16", tag, val(vs_.wm[ai]), w);
      int prop = -1;
      if (!a.launch()) {
        const auto& ro = net_.routes[static_cast<std::size_t>(a.vehicle)][static_cast<std::size_t>(a.r)];
        prop = static_cast<int>(*sc_.commodity_index(ro.propellant));
      }
      const TrajectoryModel* tm = a.model >= 0 ? &net_.models[static_cast<std::size_t>(a.model)] : nullptr;
      double z = 0.0;
      if (!a.launch()) {
        z = design(a.vehicle).dry_mass * w;
        for (int k = 0; k < K_; ++k) z += mass(k) * up(arc, k);
        eq("eq20", tag, val(vs_.z[ai]), z);
      }
      for (int k = 0; k < K_; ++k) {
        if (k == prop && !tm->linear) continue;
        const double burn = k == prop ? tm->coefficient * val(vs_.z[ai]) : 0.0;
        eq("eq16", tag + "_k" + std::to_string(k), um(arc, k), up(arc, k) - burn);
      }
      if (vs_.sos[ai] < 0) continue;
      const auto& g = model_.sos2[static_cast<std::size_t>(vs_.sos[ai])];
      double sl = 0.0, sb = 0.0, sf = 0.0;
      std::vector<std::size_t> nonzero;
      for (std::size_t i = 0; i < g.lambdas.size(); ++i) {
        const double l = val(g.lambdas[i]);
        sl += l;
        sb += l * tm->breakpoints[i].m0;
        sf += l * tm->breakpoints[i].mp;
        if (l > tol_) nonzero.push_back(i);
      }
      eq("eq17", tag, sl, w);
      eq("eq18", tag, sb, val(vs_.z[ai]));
      eq("eq19", tag, sf, up(arc, prop) - um(arc, prop));
      const bool adjacent = nonzero.size() <= 1 || (nonzero.size() == 2 && nonzero[1] == nonzero[0] + 1);
      if (!adjacent) report_.violations.push_back({"sos2", tag, static_cast<double>(nonzero.size())});
    }
  }

  void services() {
    std::map<int, double> assigned;
    for (const auto& [key, var] : vs_.h) assigned[key[1]] += val(var);
    for (const auto& [s, total] : assigned) le("eq21", "s" + std::to_string(inst_.needs[static_cast<std::size_t>(s)].need.id), total, 1.0);

    std::map<std::array<int, 2>, double> site;
    std::map<std::array<int, 3>, double> cover;
    std::map<std::array<int, 4>, double> tool;
    for (const auto& [key, var] : vs_.b) {
      const auto& wn = inst_.needs[static_cast<std::size_t>(key[1])];
      const double bv = val(var);
      if (wn.coverage_only) {
        eq("eq22", "v" + std::to_string(key[0]) + "_s" + std::to_string(wn.need.id) + "_t" + std::to_string(key[2]), bv, 1.0);
      } else {
        double expect = 0.0;
        for (const auto& [tau, steps] : wn.beta)
          if (std::find(steps.begin(), steps.end(), key[2]) != steps.end()) expect += val(vs_.H(key[0], key[1], tau));
        eq("eq22", "v" + std::to_string(key[0]) + "_s" + std::to_string(wn.need.id) + "_t" + std::to_string(key[2]), bv,
           expect);
      }
      site[{wn.node, key[2]}] += bv;
      cover[{key[0], wn.node, key[2]}] += bv;
      if (!wn.need.tool.empty()) tool[{key[0], wn.node, key[2], static_cast<int>(*sc_.commodity_index(wn.need.tool))}] += bv;
    }
    for (const auto& [key, total] : site)
      le("eq23", "i" + std::to_string(key[0]) + "_t" + std::to_string(key[1]), total, 1.0);

    for (std::size_t h = 0; h < net_.holdovers.size(); ++h) {
      const auto& ho = net_.holdovers[h];
      if (net_.nodes.kind(ho.node) != NodeKind::customer) continue;
      auto it = cover.find({ho.vehicle, ho.node, ho.step});
      const double c = it == cover.end() ? 0.0 : it->second;
      const double y = val(vs_.yp[h]);
      const std::string key = vit(ho.vehicle, ho.node, ho.step);
      if (ho.step == S_ - 1)
        le("eq24", key, c, y);
      else
        eq("eq24", key, y, c);
    }
    for (const auto& [key, total] : cover)
      if (net_.holdover_at(key[0], key[1], key[2]) < 0) report_.violations.push_back({"eq24", vit(key[0], key[1], key[2]), total});
    for (const auto& [key, need] : tool)
      le("eq25", vit(key[0], key[1], key[2]) + "_k" + std::to_string(key[3]), need,
         xp(net_.holdover_at(key[0], key[1], key[2]), key[3]));
  }

  void flights() {
    for (std::size_t a = 0; a < net_.arcs.size(); ++a)
      if (!net_.arcs[a].launch() && cls(net_.arcs[a].vehicle) == VehicleClass::servicer)
        le("eq26", arc_tag(net_, static_cast<int>(a)), val(vs_.z[a]), net_.arcs[a].mass_upper_bound * val(vs_.wp[a]));

    std::map<std::array<int, 3>, double> starts;
    for (const auto& [key, var] : vs_.h) starts[{key[0], inst_.needs[static_cast<std::size_t>(key[1])].node, key[2]}] += val(var);
    for (int v = 0; v < V_; ++v) {
      if (cls(v) != VehicleClass::servicer) continue;
      for (int i = 0; i < net_.nodes.size(); ++i) {
        if (net_.nodes.kind(i) != NodeKind::customer) continue;
        for (int t = 0; t < S_; ++t) {
          double arrivals = presence_injection(inst_, v, i, t, true);
          for (int a : net_.arcs_in(v, i, t)) arrivals += val(vs_.wp[static_cast<std::size_t>(a)]);
          auto it = starts.find({v, i, t});
          eq("eq27", vit(v, i, t), arrivals, it == starts.end() ? 0.0 : it->second);
        }
      }
    }
  }

  void reserve() {
    for (std::size_t h = 0; h < net_.holdovers.size(); ++h) {
      const auto& ho = net_.holdovers[h];
      const auto v = static_cast<std::size_t>(ho.vehicle);
      if (ho.step != S_ - 1 || !net_.nodes.is_orbital(ho.node) || vs_.reserve_route[v] < 0) continue;
      const auto& ro = net_.routes[v][static_cast<std::size_t>(vs_.reserve_route[v])];
      const int p = static_cast<int>(*sc_.commodity_index(ro.propellant));
      if (vs_.xp[h][static_cast<std::size_t>(p)] < 0) continue;
      double wet = design(ho.vehicle).dry_mass * val(vs_.yp[h]);
      for (int k = 0; k < K_; ++k) wet += mass(k) * xp(static_cast<int>(h), k);
      le("reserve", vit(ho.vehicle, ho.node, ho.step), vs_.reserve_coefficient[v] * wet, xp(static_cast<int>(h), p));
    }
  }

  const PlanningInstance& inst_;
  const DynamicNetwork& net_;
  const Scenario& sc_;
  const VariableSpace& vs_;
  const MilpModel& model_;
  const std::vector<double>& x_;
  double tol_;
  int K_, S_, V_;
  AuditReport report_;
};

}  // namespace

AuditReport audit(const PlanningInstance& inst, const BuiltModel& built, const std::vector<double>& values, double tol) {
  if (values.size() != built.model.cols.size()) {
    AuditReport r;
    r.violations.push_back({"values", "size", static_cast<double>(values.size())});
    return r;
  }
  return Auditor(inst, built, values, tol).run();
}

}  // namespace oos
