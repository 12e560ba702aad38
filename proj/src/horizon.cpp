#include "oos/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "oos/milp/builder.hpp"
#include "oos/text.hpp"

namespace oos {

std::string to_string(ReplanTrigger t) { return t == ReplanTrigger::periodic ? "periodic" : "on_random_need"; }

void validate(const RhConfig& cfg, const Scenario& scenario) {
  const int T = scenario.grid.period;
  if (cfg.window_days < T) throw std::invalid_argument("window must be at least one grid period");
  if (cfg.commit_days <= 0 || cfg.commit_days > cfg.window_days)
    throw std::invalid_argument("commit length must be in (0, window]");
  if (cfg.commit_days % T != 0) throw std::invalid_argument("commit length must be a whole number of grid periods");
  if (cfg.campaign_days <= 0 || cfg.campaign_days % cfg.commit_days != 0)
    throw std::invalid_argument("campaign length " + std::to_string(cfg.campaign_days) +
                                " is not a multiple of the commit length " + std::to_string(cfg.commit_days));
}

double Ledger::value_of(const LedgerRow& r, double investment) {
  return r.revenues - investment - (r.launch + r.pdm + r.delay + r.depot_ops + r.servicer_ops);
}

void Ledger::open(int day, double investment) {
  initial_investment = investment;
  rows.clear();
  LedgerRow r;
  r.day = day;
  r.value = value_of(r, investment);
  rows.push_back(r);
}

void Ledger::accrue(int day, const std::map<std::string, double>& c) {
  LedgerRow r = rows.empty() ? LedgerRow{} : rows.back();
  r.day = day;
  auto get = [&](const char* k) {
    auto it = c.find(k);
    return it == c.end() ? 0.0 : it->second;
  };
  r.revenues += get("revenues");
  r.launch += get("launch");
  r.pdm += get("pdm");
  r.delay += get("delay");
  r.depot_ops += get("depot_ops");
  r.servicer_ops += get("servicer_ops");
  r.value = value_of(r, initial_investment);
  rows.push_back(r);
}

std::string Ledger::to_csv() const {
  std::ostringstream os;
  os << "day,revenues,launch,pdm,delay,depot_ops,servicer_ops,value\n";
  for (const auto& r : rows)
    os << r.day << ',' << format_double(r.revenues) << ',' << format_double(r.launch) << ',' << format_double(r.pdm)
       << ',' << format_double(r.delay) << ',' << format_double(r.depot_ops) << ',' << format_double(r.servicer_ops)
       << ',' << format_double(r.value) << '\n';
  return os.str();
}

Ledger parse_ledger_csv(const std::string& text) {
  Ledger l;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "day,revenues,launch,pdm,delay,depot_ops,servicer_ops,value")
        throw ParseError("ledger:1: unexpected header", 1);
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 8) throw ParseError("ledger:" + std::to_string(lineno) + ": expected 8 fields", lineno);
    LedgerRow r{std::stoi(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                std::stod(f[5]), std::stod(f[6]), std::stod(f[7])};
    l.rows.push_back(r);
  }
  if (!l.rows.empty()) l.initial_investment = -l.rows.front().value;
  return l;
}

WorldState initial_world(const Scenario& scenario) {
  WorldState w;
  w.day = 0;
  w.state = initial_state_from_fleet(scenario, 0);
  w.ledger.open(0, scenario.initial_investment());
  return w;
}

std::vector<ServiceNeed> window_demand(const DemandStream& stream, const WorldState& world, int window_days) {
  std::set<int> pinned;
  for (const auto& p : world.state.starts) pinned.insert(p.need_id);
  const int d = world.day;
  std::vector<ServiceNeed> out;
  for (const auto& n : stream.needs) {
    if (pinned.contains(n.id)) {
      out.push_back(n);
      continue;
    }
    if (world.handled.contains(n.id)) continue;
    if (!(n.occurrence + n.window > d)) continue;
    const bool seen = n.kind == OccurrenceKind::deterministic ? n.occurrence < d + window_days : n.occurrence <= d;
    if (seen) out.push_back(n);
  }
  return out;
}

int commit_day(const RhConfig& cfg, const Scenario& scenario, const DemandStream& stream, int day) {
  if (cfg.trigger == ReplanTrigger::periodic) return std::min(day + cfg.commit_days, cfg.campaign_days);
  const int T = scenario.grid.period;
  double next = std::numeric_limits<double>::infinity();
  for (const auto& n : stream.needs)
    if (n.kind == OccurrenceKind::random && n.occurrence > day) next = std::min(next, n.occurrence);
  int c = std::min(day + cfg.window_days - T, cfg.campaign_days);
  if (std::isfinite(next)) c = std::min(c, static_cast<int>(std::ceil(next / T)) * T);
  return std::max(day + T, c);
}

namespace {

std::map<std::string, double> loads_of(const Scenario& sc, const std::vector<int>& vars, const std::vector<double>& x) {
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k] < 0) continue;
    double q = x[static_cast<std::size_t>(vars[k])];
    if (sc.commodities[k].is_integral()) q = std::round(q);
    if (q > 1e-9) out[sc.commodities[k].id] = q;
  }
  return out;
}

}  // namespace

StepResult step(const StepContext& ctx, const WorldState& world, const std::vector<ServiceNeed>& visible) {
  const auto& sc = ctx.scenario;
  const auto& cfg = ctx.cfg;
  const int d = world.day;
  const int horizon = std::min(cfg.window_days, cfg.campaign_days - d);
  InstanceOptions io;
  io.breakpoints = cfg.breakpoints;
  io.terminal_reserve = cfg.terminal_reserve;
  PlanningInstance inst = build_instance(sc, ctx.catalog, visible, world.state, d, horizon, ctx.registry, io);
  BuiltModel built = build_model(inst);
  Solution sol = ctx.backend.solve(built.model, cfg.solver);
  // The reserve is sized from this window's arcs, so a vehicle that is pinned
  // on site or short of propellant may be unable to meet it.  Plan without it
  // rather than abandon the campaign.
  if (!sol.accepted() && inst.terminal_reserve && sol.status == SolveStatus::infeasible) {
    inst.terminal_reserve = false;
    inst.warnings.push_back("day " + std::to_string(d) + ": terminal reserve infeasible, window planned without it");
    built = build_model(inst);
    sol = ctx.backend.solve(built.model, cfg.solver);
  }
  if (!sol.accepted()) {
    std::string msg = "window starting day " + std::to_string(d) + ": " + to_string(sol.status) + " (" + sol.message + ")";
    if (!sol.iis_rows.empty()) {
      msg += "; irreducible rows:";
      for (std::size_t i = 0; i < sol.iis_rows.size() && i < 12; ++i) msg += " " + sol.iis_rows[i];
    }
    throw CampaignError(msg);
  }
  if (cfg.audit) {
    auto rep = audit(inst, built, sol.values);
    if (!rep.ok()) throw CampaignError("window starting day " + std::to_string(d) + ": " + rep.summary());
  }

  StepResult res;
  res.start_day = d;
  res.warnings = inst.warnings;
  const auto& net = inst.net;
  const auto& vs = built.vars;
  const auto& x = sol.values;
  const int c = std::min(commit_day(cfg, sc, ctx.stream, d), d + horizon);
  const int tc = net.grid.index_of(c);
  if (tc < 0) throw CampaignError("commit day " + std::to_string(c) + " is not a grid step");
  res.commit_day = c;
  res.solution = sol;
  res.schedule = extract_schedule(inst, built, sol);

  // Realized components: every cost or revenue whose decision falls in [d, c).
  std::vector<int> var_day(built.model.cols.size(), std::numeric_limits<int>::max());
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const int day = net.grid.day(net.arcs[a].dep);
    var_day[static_cast<std::size_t>(vs.wp[a])] = day;
    for (int u : vs.up[a])
      if (u >= 0) var_day[static_cast<std::size_t>(u)] = day;
  }
  for (std::size_t h = 0; h < net.holdovers.size(); ++h)
    var_day[static_cast<std::size_t>(vs.yp[h])] = net.grid.day(net.holdovers[h].step);
  for (const auto& [key, var] : vs.h) var_day[static_cast<std::size_t>(var)] = net.grid.day(key[2]);
  for (const auto& comp : objective_components()) {
    double total = 0.0;
    auto it = built.model.components.find(comp);
    if (it != built.model.components.end())
      for (const auto& [var, coef] : it->second) {
        const int day = var_day[static_cast<std::size_t>(var)];
        if (day >= d && day < c) total += coef * x[static_cast<std::size_t>(var)];
      }
    res.accrued[comp] = total;
  }

  // State at the commit day.
  WorldState next;
  next.day = c;
  next.handled = world.handled;
  next.state.day = c;
  auto on = [&](int var) { return var >= 0 && x[static_cast<std::size_t>(var)] > 0.5; };
  auto node_name = [&](int i) { return net.nodes.nodes[static_cast<std::size_t>(i)].name; };
  for (std::size_t v = 0; v < net.vehicles.size(); ++v) {
    const auto& veh = net.vehicles[v];
    const int vi = static_cast<int>(v);
    if (veh.cls == VehicleClass::launcher) continue;
    for (int i = 0; i < net.nodes.size(); ++i) {
      const int h = tc > 0 ? net.holdover_at(vi, i, tc - 1) : -1;
      if (h >= 0 && on(vs.yp[static_cast<std::size_t>(h)]))
        next.state.injections.push_back({veh.id, node_name(i), c, false, loads_of(sc, vs.xm[static_cast<std::size_t>(h)], x)});
    }
  }
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const auto& arc = net.arcs[a];
    if (!on(vs.wp[a]) || arc.dep >= tc || arc.arr < tc) continue;
    const auto& veh = net.vehicles[static_cast<std::size_t>(arc.vehicle)];
    const bool cargo_only = veh.cls == VehicleClass::launcher;
    next.state.injections.push_back({cargo_only ? std::string() : veh.id, node_name(arc.to), net.grid.day(arc.arr),
                                     !cargo_only, loads_of(sc, vs.um[a], x)});
  }
  // A launcher that delivered nothing leaves no trace.
  std::erase_if(next.state.injections, [](const Injection& j) { return j.vehicle.empty() && j.commodities.empty(); });

  for (const auto& inj : next.state.injections) {
    if (!inj.arrival) continue;
    for (const auto& [key, var] : vs.h) {
      const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
      if (on(var) && net.vehicles[static_cast<std::size_t>(key[0])].id == inj.vehicle && node_name(wn.node) == inj.node &&
          net.grid.day(key[2]) == inj.day)
        next.state.starts.push_back({wn.need.id, inj.vehicle, inj.day});
    }
  }
  for (const auto& [key, var] : vs.h) {
    if (!on(var)) continue;
    const auto& wn = inst.needs[static_cast<std::size_t>(key[1])];
    const int start = net.grid.day(key[2]);
    if (start >= c) continue;
    next.handled.insert(wn.need.id);
    const double end = start + wn.need.duration;
    if (end > c)
      next.state.coverage.push_back({wn.need.id, net.vehicles[static_cast<std::size_t>(key[0])].id, wn.need.satellite,
                                     wn.need.tool, c, static_cast<int>(std::ceil(end))});
  }
  for (auto cov : world.state.coverage)
    if (cov.to_day > c) {
      cov.from_day = c;
      next.state.coverage.push_back(cov);
    }

  next.ledger = world.ledger;
  next.ledger.accrue(c, res.accrued);
  res.next = std::move(next);
  return res;
}

CampaignResult run_campaign(const RhConfig& cfg, const Scenario& scenario, const std::vector<CustomerSat>& catalog,
                            const DemandStream& stream, const PluginRegistry& registry, const Backend& backend,
                            const std::function<void(const StepResult&)>& progress) {
  validate(cfg, scenario);
  CampaignResult out;
  out.stream = stream;
  StepContext ctx{scenario, catalog, stream, registry, backend, cfg};
  WorldState world = initial_world(scenario);
  while (world.day < cfg.campaign_days) {
    auto visible = window_demand(stream, world, cfg.window_days);
    StepResult r = step(ctx, world, visible);
    out.windows.push_back({r.start_day, r.commit_day, to_string(r.solution.status), r.solution.objective, r.schedule, r.warnings});
    if (progress) progress(r);
    world = std::move(r.next);
  }
  out.ledger = world.ledger;
  return out;
}

std::string campaign_summary_json(const CampaignResult& r, const RhConfig& cfg, const Scenario& scenario) {
  nlohmann::json j;
  j["scenario"] = scenario.name;
  j["seed"] = cfg.seed;
  j["campaign_days"] = cfg.campaign_days;
  j["window_days"] = cfg.window_days;
  j["commit_days"] = cfg.commit_days;
  j["trigger"] = to_string(cfg.trigger);
  j["initial_investment"] = r.ledger.initial_investment;
  const auto& last = r.ledger.last();
  j["final"] = {{"day", last.day},         {"revenues", last.revenues}, {"launch", last.launch},
                {"pdm", last.pdm},         {"delay", last.delay},       {"depot_ops", last.depot_ops},
                {"servicer_ops", last.servicer_ops}, {"value", last.value}};
  int served = 0;
  for (const auto& w : r.windows)
    for (const auto& o : w.schedule.outcomes)
      if (o.served && o.start_day >= w.start_day && o.start_day < w.commit_day) ++served;
  j["needs_total"] = r.stream.needs.size();
  j["needs_served"] = served;
  j["windows"] = r.windows.size();
  return j.dump(2) + "\n";
}

}  // namespace oos
