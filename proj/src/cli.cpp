#include "oos/cli.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "oos/demand.hpp"
#include "oos/horizon.hpp"
#include "oos/milp/audit.hpp"
#include "oos/milp/builder.hpp"
#include "oos/milp/instance.hpp"
#include "oos/milp/schedule.hpp"
#include "oos/milp/solve.hpp"
#include "oos/text.hpp"
#include "oos/trajectory.hpp"

namespace oos {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << text;
  if (!f) throw UsageError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Scenario load_checked_scenario(const fs::path& path) {
  try {
    return load_scenario(path);
  } catch (const ParseError& e) {
    throw UsageError("scenario " + path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw UsageError("scenario " + path.string() + ": " + e.what());
  }
}

std::vector<CustomerSat> load_checked_catalog(const RunManifest& m) {
  std::vector<CustomerSat> sats;
  try {
    sats = load_catalog(m.catalog);
  } catch (const ParseError& e) {
    throw UsageError("catalog " + m.catalog.string() + ": " + e.what());
  }
  if (m.max_satellites && static_cast<std::size_t>(*m.max_satellites) < sats.size())
    sats.resize(static_cast<std::size_t>(*m.max_satellites));
  return sats;
}

DemandStream load_demand(const RunManifest& m, const std::vector<CustomerSat>& sats, const Scenario& sc,
                         double horizon) {
  if (!m.demand) return generate_demand(sats, sc, horizon, m.seed);
  try {
    DemandStream s = import_demand_csv(read_text(*m.demand), sats, sc);
    s.seed = m.seed;
    return s;
  } catch (const ParseError& e) {
    throw UsageError("demand " + m.demand->string() + ": " + e.what());
  }
}

SolveOptions solve_options(const RunManifest& m, const Scenario& sc) {
  SolveOptions o;
  o.mip_gap = m.gap.value_or(sc.solver.mip_gap);
  o.time_limit = m.time_limit.value_or(sc.solver.time_limit);
  o.threads = 1;
  o.seed = static_cast<int>(m.seed % static_cast<std::uint64_t>(INT_MAX));
  return o;
}

std::unique_ptr<Backend> checked_backend(const std::string& spec) {
  try {
    return make_backend(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string money(double usd) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << usd / 1e6 << " M$";
  return os.str();
}

std::map<std::string, int> modes_used(const Schedule& s) {
  std::map<std::string, int> out;
  for (const auto& e : s.events)
    if (e.kind == "depart") ++out[e.mode];
  return out;
}

/// The same scenario with every servicer design at dry mass `mass`.
Scenario with_servicer_dry_mass(Scenario sc, double mass) {
  for (auto& d : sc.designs)
    if (d.cls == VehicleClass::servicer) d.dry_mass = mass;
  try {
    validate(sc);
  } catch (const ValidationError& e) {
    throw UsageError("dry mass " + format_double(mass) + ": " + e.what());
  }
  return sc;
}

}  // namespace

void check_manifest(const RunManifest& m) {
  auto need_file = [](const fs::path& p, const char* what) {
    if (p.empty()) throw UsageError(std::string(what) + " path is required");
    if (!fs::exists(p)) throw UsageError(std::string(what) + " file not found: " + p.string());
    if (!fs::is_regular_file(p)) throw UsageError(std::string(what) + " is not a regular file: " + p.string());
  };
  need_file(m.scenario, "scenario");
  need_file(m.catalog, "catalog");
  if (m.demand) need_file(*m.demand, "demand");
  if (m.horizon_days && *m.horizon_days <= 0) throw UsageError("--horizon-days must be positive");
  if (m.gap && !(*m.gap >= 0.0 && *m.gap < 1.0)) throw UsageError("--gap must be in [0, 1)");
  if (m.time_limit && !(*m.time_limit > 0.0)) throw UsageError("--time-limit must be positive");
  if (m.breakpoints && *m.breakpoints < 2) throw UsageError("--breakpoints must be at least 2");
  if (m.max_satellites && *m.max_satellites < 0) throw UsageError("--max-satellites must be nonnegative");
  if (m.jobs < 1) throw UsageError("--jobs must be at least 1");
  for (double d : m.servicer_dry_mass)
    if (!(d > 0.0)) throw UsageError("--servicer-dry-mass values must be positive");
  if (m.trigger != "periodic" && m.trigger != "on_random_need")
    throw UsageError("--trigger must be periodic or on_random_need");
}

int cmd_plan(const RunManifest& m, std::ostream& out, std::ostream& err) {
  check_manifest(m);
  const Scenario sc = load_checked_scenario(m.scenario);
  const auto sats = load_checked_catalog(m);
  const int horizon = m.horizon_days.value_or(90);
  const DemandStream stream = load_demand(m, sats, sc, horizon);
  auto backend = checked_backend(m.backend);

  // A single plan sees every need arising inside its horizon.
  std::vector<ServiceNeed> visible;
  for (const auto& n : stream.needs)
    if (n.occurrence < horizon) visible.push_back(n);
  InstanceOptions io;
  io.breakpoints = m.breakpoints;
  io.terminal_reserve = m.terminal_reserve.value_or(false);
  PlanningInstance inst;
  BuiltModel built;
  try {
    inst = build_instance(sc, sats, visible, initial_state_from_fleet(sc, 0), 0, horizon,
                          PluginRegistry::with_defaults(), io);
    built = build_model(inst);
  } catch (const std::exception& e) {
    err << "error: cannot build the model: " << e.what() << "\n";
    return kExitModel;
  }
  for (const auto& w : inst.warnings) err << "warning: " << w << "\n";
  if (m.export_lp) write_text(*m.export_lp, write_lp(built.model));

  const Solution sol = backend->solve(built.model, solve_options(m, sc));
  if (!sol.accepted()) {
    err << "error: plan not solved: " << to_string(sol.status);
    if (!sol.message.empty()) err << " (" << sol.message << ")";
    err << "\n";
    if (!sol.iis_rows.empty()) {
      err << "irreducible infeasible rows:";
      for (const auto& r : sol.iis_rows) err << " " << r;
      err << "\n";
    }
    return kExitModel;
  }
  const AuditReport rep = audit(inst, built, sol.values);
  if (!rep.ok()) {
    err << "error: solution failed the audit: " << rep.summary() << "\n";
    return kExitModel;
  }
  const Schedule sched = extract_schedule(inst, built, sol);

  Ledger ledger;
  ledger.open(0, sc.initial_investment());
  ledger.accrue(horizon, sched.components);
  const auto modes = modes_used(sched);
  int served = 0;
  for (const auto& o : sched.outcomes) served += o.served ? 1 : 0;

  nlohmann::json sj;
  sj["scenario"] = sc.name;
  sj["seed"] = m.seed;
  sj["horizon_days"] = horizon;
  sj["backend"] = backend->name();
  sj["status"] = sched.status;
  sj["objective"] = sched.objective;
  sj["gap"] = sched.gap;
  sj["components"] = sched.components;
  sj["initial_investment"] = sc.initial_investment();
  sj["needs_total"] = sched.outcomes.size();
  sj["needs_served"] = served;
  sj["flight_modes"] = modes;
  sj["columns"] = built.model.cols.size();
  sj["rows"] = built.model.rows.size();
  sj["warnings"] = inst.warnings;

  write_text(m.out / "schedule.json", export_schedule_json(sched));
  write_text(m.out / "ledger.csv", ledger.to_csv());
  write_text(m.out / "demand.csv", export_demand_csv(stream));
  write_text(m.out / "summary.json", sj.dump(2) + "\n");

  out << "status: " << sched.status << " (gap " << std::setprecision(4) << sched.gap * 100 << "%)\n";
  out << "profit: " << money(sched.objective) << "\n";
  for (const auto& c : objective_components()) out << "  " << c << ": " << money(sched.components.at(c)) << "\n";
  out << "needs served: " << served << " of " << sched.outcomes.size() << "\n";
  for (const auto& o : sched.outcomes)
    if (o.served)
      out << "  need " << o.need_id << " " << o.type << " at " << o.satellite << " by " << o.vehicle << " on day "
          << o.start_day << ", revenue " << money(o.revenue) << "\n";
  out << "flight modes:";
  if (modes.empty()) out << " none";
  for (const auto& [mode, n] : modes) out << " " << mode << " x" << n;
  out << "\n";
  if (m.export_lp) out << "model written to " << m.export_lp->string() << "\n";
  out << "artifacts in " << m.out.string() << "\n";
  return kExitOk;
}

int cmd_campaign(const RunManifest& m, std::ostream& out, std::ostream& err) {
  check_manifest(m);
  const Scenario base = load_checked_scenario(m.scenario);
  const auto sats = load_checked_catalog(m);
  auto backend = checked_backend(m.backend);

  RhConfig cfg;
  cfg.campaign_days = m.campaign_days;
  cfg.window_days = m.horizon_days.value_or(90);
  cfg.commit_days = m.commit_days;
  cfg.trigger = m.trigger == "periodic" ? ReplanTrigger::periodic : ReplanTrigger::on_random_need;
  cfg.solver = solve_options(m, base);
  cfg.seed = m.seed;
  cfg.breakpoints = m.breakpoints;
  cfg.terminal_reserve = m.terminal_reserve.value_or(true);
  try {
    validate(cfg, base);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const DemandStream stream = load_demand(m, sats, base, cfg.campaign_days);

  struct Run {
    Scenario scenario;
    fs::path dir;
    std::string label;
    int code = kExitOk;
    std::string error;
    double final_value = 0.0;
  };
  std::vector<Run> runs;
  if (m.servicer_dry_mass.empty()) {
    runs.push_back(Run{base, m.out, base.name, kExitOk, {}, 0.0});
  } else {
    for (double mass : m.servicer_dry_mass) {
      const std::string tag = "dry_mass_" + format_double(mass);
      runs.push_back(Run{with_servicer_dry_mass(base, mass), m.out / tag, tag, kExitOk, {}, 0.0});
    }
  }

  const PluginRegistry registry = PluginRegistry::with_defaults();
  std::mutex io_mu;
  auto run_one = [&](Run& run) {
    try {
      auto progress = [&](const StepResult& r) {
        if (m.quiet) return;
        std::lock_guard<std::mutex> lock(io_mu);
        out << run.label << ": day " << r.start_day << "-" << r.commit_day << " " << to_string(r.solution.status)
            << " value " << money(r.next.ledger.last().value) << "\n";
        for (const auto& w : r.warnings) err << run.label << ": warning: " << w << "\n";
      };
      CampaignResult res = run_campaign(cfg, run.scenario, sats, stream, registry, *backend, progress);
      std::ostringstream value_csv;
      value_csv << "day,value\n";
      for (const auto& row : res.ledger.rows) value_csv << row.day << ',' << format_double(row.value) << '\n';
      nlohmann::json windows = nlohmann::json::array();
      for (const auto& w : res.windows)
        windows.push_back({{"start_day", w.start_day},
                           {"commit_day", w.commit_day},
                           {"status", w.status},
                           {"objective", w.objective},
                           {"schedule", to_json(w.schedule)},
                           {"warnings", w.warnings}});
      write_text(run.dir / "ledger.csv", res.ledger.to_csv());
      write_text(run.dir / "value.csv", value_csv.str());
      write_text(run.dir / "demand.csv", export_demand_csv(res.stream));
      write_text(run.dir / "windows.json", windows.dump(2) + "\n");
      write_text(run.dir / "summary.json", campaign_summary_json(res, cfg, run.scenario));
      run.final_value = res.ledger.last().value;
    } catch (const UsageError& e) {
      run.code = kExitUsage;
      run.error = e.what();
    } catch (const std::exception& e) {
      run.code = kExitModel;
      run.error = e.what();
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(m.jobs), runs.size());
  if (workers <= 1) {
    for (auto& r : runs) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) run_one(runs[i]);
      });
    for (auto& t : pool) t.join();
  }

  int code = kExitOk;
  for (const auto& r : runs) {
    if (r.code != kExitOk) {
      err << "error: " << r.label << ": " << r.error << "\n";
      code = std::max(code, r.code);
    } else {
      out << r.label << ": value at day " << cfg.campaign_days << ": " << money(r.final_value) << " (ledger in "
          << (r.dir / "ledger.csv").string() << ")\n";
    }
  }
  return code;
}

int cmd_trajectory(const TrajectoryArgs& a, std::ostream& out, std::ostream& err) {
  if (a.mode != "ht" && a.mode != "lt") throw UsageError("--mode must be ht or lt");
  if (a.breakpoints < 2) throw UsageError("--breakpoints must be at least 2");
  if (!(a.tof_days > 0)) throw UsageError("--tof-days must be positive");
  if (!(a.mass_min >= 0) || !(a.mass_max > a.mass_min)) throw UsageError("need 0 <= --mass-min < --mass-max");
  TrajectoryQuery q;
  q.from_longitude = a.from_longitude;
  q.to_longitude = a.to_longitude;
  q.radius = a.radius_km * 1e3;
  q.time_of_flight = a.tof_days * 86400.0;
  q.thrust = a.thrust;
  q.isp = a.isp;
  q.mass_min = a.mass_min;
  q.mass_max = a.mass_max;
  q.breakpoints = a.breakpoints;

  // Report lines go to stdout unless the curve itself does.
  std::ostream& report = a.out ? out : err;
  TrajectoryModel model;
  try {
    if (a.mode == "ht") {
      if (!(a.isp > 0)) throw UsageError("--isp must be positive");
      model = ht_model(q);
    } else {
      if (!(a.thrust > 0) || !(a.isp > 0)) throw UsageError("--thrust and --isp must be positive");
      model = lt_model(q, a.breakpoints);
      if (a.graded) {
        const double hi = std::min(q.mass_max, model.mass_upper_bound);
        model.breakpoints = linearize_graded(
            [&](double m0) {
              return lt_propellant(std::min(m0, model.mass_upper_bound), model.delta_theta, q.time_of_flight,
                                   q.radius, q.thrust, q.isp, q.g0);
            },
            q.mass_min, hi, a.breakpoints);
      }
    }
  } catch (const InfeasibleTrajectory& e) {
    err << "error: infeasible trajectory: " << e.what() << "\n";
    if (a.mode == "lt") {
      const double dtheta = signed_phase_angle(a.from_longitude, a.to_longitude);
      err << "M_ub_kg: " << format_double(lt_mass_upper_bound(dtheta, q.time_of_flight, q.radius, q.thrust)) << "\n";
    }
    return kExitModel;
  }

  std::ostringstream csv;
  csv << "m0_kg,mp_kg\n";
  for (const auto& b : model.breakpoints) csv << format_double(b.m0) << ',' << format_double(b.mp) << '\n';
  if (a.out)
    write_text(*a.out, csv.str());
  else
    out << csv.str();

  report << std::fixed << std::setprecision(3);
  if (a.mode == "ht") {
    report << "delta_v_m_s: " << model.delta_v << "\n";
    report << "k1: " << model.chosen.k1 << "\nk2: " << model.chosen.k2 << "\n";
    report << "semi_major_axis_km: " << model.chosen.a / 1e3 << "\n";
    report << "flight_time_days: " << model.chosen.tf / 86400.0 << "\n";
    report << "propellant_fraction: " << std::setprecision(6) << model.coefficient << "\n";
    report << "M_ub_kg: unbounded (impulsive)\n";
  } else {
    report << "delta_theta_deg: " << model.delta_theta * 180.0 / std::numbers::pi << "\n";
    if (std::isinf(model.mass_upper_bound))
      report << "M_ub_kg: unbounded (no phase change)\n";
    else
      report << "M_ub_kg: " << model.mass_upper_bound << "\n";
  }
  report << std::defaultfloat;
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"On-orbit servicing logistics planner"};
  app.name("oosplan");
  app.require_subcommand(1);

  RunManifest plan;
  RunManifest camp;
  TrajectoryArgs traj;
  auto common = [](CLI::App* sub, RunManifest& m) {
    sub->add_option("--scenario", m.scenario, "Scenario JSON file")->required();
    sub->add_option("--catalog", m.catalog, "Satellite catalog CSV (name,longitude_deg)")->required();
    sub->add_option("--demand", m.demand, "Replay demand CSV instead of generating needs");
    sub->add_option("--max-satellites", m.max_satellites, "Use only the first N catalog satellites");
    sub->add_option("--seed", m.seed, "Demand and solver seed");
    sub->add_option("--gap", m.gap, "Relative MIP gap");
    sub->add_option("--time-limit", m.time_limit, "Solver time limit per window, s");
    sub->add_option("--backend", m.backend, "highs, lp, or lp:<command>");
    sub->add_option("--breakpoints", m.breakpoints, "Low-thrust breakpoints per arc");
    sub->add_option("--out", m.out, "Output directory");
  };

  auto* p = app.add_subcommand("plan", "Single-horizon schedule");
  common(p, plan);
  p->add_option("--horizon-days", plan.horizon_days, "Planning horizon, days (default 90)");
  p->add_option("--export-lp", plan.export_lp, "Also write the model as an LP file");
  bool plan_reserve = false;
  p->add_flag("--terminal-reserve", plan_reserve, "Keep flight propellant at the horizon end");

  auto* c = app.add_subcommand("campaign", "Rolling-horizon campaign");
  common(c, camp);
  c->add_option("--horizon-days", camp.horizon_days, "Window length, days (default 90)");
  c->add_option("--campaign-days", camp.campaign_days, "Campaign length, days");
  c->add_option("--commit-days", camp.commit_days, "Committed part of each window, days");
  c->add_option("--trigger", camp.trigger, "periodic or on_random_need");
  c->add_option("--servicer-dry-mass", camp.servicer_dry_mass, "Comma-separated dry-mass sweep, kg")
      ->delimiter(',');
  c->add_option("--jobs", camp.jobs, "Concurrent sweep runs");
  bool no_reserve = false;
  c->add_flag("--no-terminal-reserve", no_reserve, "Drop the end-of-window propellant reserve");
  c->add_flag("--quiet", camp.quiet, "No per-window progress");

  auto* t = app.add_subcommand("trajectory", "Dump a propellant curve as CSV");
  t->add_option("--mode", traj.mode, "ht or lt");
  t->add_option("--from-lon", traj.from_longitude, "Servicer longitude, deg");
  t->add_option("--to-lon", traj.to_longitude, "Target longitude, deg");
  t->add_option("--tof-days", traj.tof_days, "Time of flight, days");
  t->add_option("--thrust", traj.thrust, "Thrust, N");
  t->add_option("--isp", traj.isp, "Specific impulse, s");
  t->add_option("--radius-km", traj.radius_km, "Orbit radius, km");
  t->add_option("--mass-min", traj.mass_min, "Smallest initial mass, kg");
  t->add_option("--mass-max", traj.mass_max, "Largest initial mass, kg");
  t->add_option("--breakpoints", traj.breakpoints, "Breakpoint count");
  t->add_flag("--graded", traj.graded, "Cluster breakpoints toward the mass bound");
  t->add_option("--out", traj.out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*p) {
      plan.command = "plan";
      if (plan_reserve) plan.terminal_reserve = true;
      return cmd_plan(plan, out, err);
    }
    if (*c) {
      camp.command = "campaign";
      if (no_reserve) camp.terminal_reserve = false;
      return cmd_campaign(camp, out, err);
    }
    return cmd_trajectory(traj, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitModel;
  }
}

}  // namespace oos
