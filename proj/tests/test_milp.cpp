#include <cmath>
#include <set>

#include "doctest.h"
#include "oos/milp/audit.hpp"
#include "oos/milp/schedule.hpp"
#include "support/micro.hpp"

using namespace oos;
using namespace oos::testing;

namespace {

const HighsBackend& highs() {
  static const HighsBackend b;
  return b;
}

MicroInstance single_need(double revenue, double occurrence, double window = 25) {
  ServiceTypeSpec s;
  s.id = "fix";
  s.revenue = revenue;
  s.delay_penalty_per_day = 1e5;
  s.duration = 10;
  s.window = window;
  s.occurrence_days = 1000;
  s.required_tool = "T1";
  MicroInstance mi;
  mi.scenario = micro_scenario(MicroPropulsion::high_thrust, 2000, {{"biprop", 800}, {"monoprop", 100}}, {s});
  mi.catalog = {{"C1", 30.0}};
  mi.needs = {make_need(0, mi.catalog[0], 0, s, occurrence)};
  return mi;
}

double component_sum(const Schedule& s) {
  double v = s.components.at("revenues");
  for (const auto& c : objective_components())
    if (c != "revenues") v -= s.components.at(c);
  return v;
}

}  // namespace

TEST_SUITE("milp") {
  TEST_CASE("optimum matches enumeration on micro instances") {
    for (std::uint64_t seed = 101; seed <= 125; ++seed) {
      CAPTURE(seed);
      const MicroInstance mi = random_micro(seed);
      const OracleResult ref = enumerate(mi);
      const Solved s = solve_micro(mi, highs());
      REQUIRE(s.sol.accepted());
      CHECK(rel_diff(s.sol.objective, ref.best) <= 1e-6);
      CHECK(audit(s.inst, s.built, s.sol.values).ok());
    }
  }

  TEST_CASE("LP-file backend agrees with in-process HiGHS") {
    const LpFileBackend lp(OOS_LP_SOLVE_BIN);
    for (std::uint64_t seed = 201; seed <= 210; ++seed) {
      CAPTURE(seed);
      const MicroInstance mi = random_micro(seed);
      const Solved a = solve_micro(mi, highs());
      const Solved b = solve_micro(mi, lp);
      REQUIRE(a.sol.accepted());
      REQUIRE(b.sol.accepted());
      CHECK(rel_diff(a.sol.objective, b.sol.objective) <= 1e-6);
      CHECK(audit(b.inst, b.built, b.sol.values).ok());
    }
  }

  TEST_CASE("a profitable need is served and the schedule follows one path") {
    const MicroInstance mi = single_need(20e6, 3.0);
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    const Schedule sch = extract_schedule(s.inst, s.built, s.sol);
    REQUIRE(sch.outcomes.size() == 1);
    CHECK(sch.outcomes[0].served);
    CHECK(sch.outcomes[0].vehicle == "svc-1");
    CHECK(sch.outcomes[0].start_day >= 4);
    CHECK(sch.outcomes[0].revenue == 20e6);
    CHECK(sch.outcomes[0].delay_cost == doctest::Approx(1e5 * (sch.outcomes[0].start_day - 4)));
    CHECK(check_path_continuity(sch).empty());
    CHECK(component_sum(sch) == doctest::Approx(sch.objective).epsilon(1e-6));
    CHECK(rel_diff(sch.objective, enumerate(mi).best) <= 1e-6);
    int departs = 0;
    for (const auto& e : sch.events)
      if (e.kind == "depart") {
        ++departs;
        CHECK(e.mode == "high_thrust/phasing");
        CHECK(e.amount > 0.0);
      }
    CHECK(departs >= 1);
  }

  TEST_CASE("an unprofitable need is left alone") {
    const MicroInstance mi = single_need(1e3, 3.0);
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    const Schedule sch = extract_schedule(s.inst, s.built, s.sol);
    CHECK_FALSE(sch.outcomes.at(0).served);
    // Nothing moves; the servicer only pays for idling at its parking node.
    CHECK(sch.components.at("revenues") == 0.0);
    CHECK(sch.objective == doctest::Approx(-13000.0 * 34));
  }

  TEST_CASE("a servicer without the tool cannot serve") {
    MicroInstance mi = single_need(20e6, 3.0);
    mi.scenario.designs[0].tools_installed.clear();
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    CHECK_FALSE(extract_schedule(s.inst, s.built, s.sol).outcomes.at(0).served);
  }

  TEST_CASE("objective equals revenues minus the five cost terms") {
    const MicroInstance mi = random_micro(303);
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    const auto& m = s.built.model;
    double v = m.component_value("revenues", s.sol.values);
    for (const auto& c : objective_components())
      if (c != "revenues") v -= m.component_value(c, s.sol.values);
    CHECK(v == doctest::Approx(m.objective_value(s.sol.values)).epsilon(1e-9));
    CHECK(v == doctest::Approx(s.sol.objective).epsilon(1e-6));
  }

  TEST_CASE("audit flags a corrupted flow") {
    const MicroInstance mi = single_need(20e6, 3.0);
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    REQUIRE(audit(s.inst, s.built, s.sol.values).ok());
    // Propellant appears from nowhere on the first holdover.
    auto x = s.sol.values;
    const int h0 = s.built.vars.xp.at(0).at(static_cast<std::size_t>(*s.inst.scenario.commodity_index("biprop")));
    REQUIRE(h0 >= 0);
    x[static_cast<std::size_t>(h0)] += 1.0;
    std::set<std::string> broken;
    for (const auto& r : s.built.model.rows) {
      double lhs = 0.0;
      for (const auto& [v, c] : r.terms) lhs += c * x[static_cast<std::size_t>(v)];
      const double d = lhs - r.rhs;
      if (r.sense == Sense::eq ? std::abs(d) > 1e-6 : r.sense == Sense::le ? d > 1e-6 : d < -1e-6) broken.insert(r.name);
    }
    REQUIRE_FALSE(broken.empty());
    std::set<std::string> flagged;
    for (const auto& v : audit(s.inst, s.built, x).violations) flagged.insert(v.family + "_" + v.key);
    CHECK(flagged == broken);
  }

  TEST_CASE("audit flags fractional assignments and bound breaks") {
    const MicroInstance mi = single_need(20e6, 3.0);
    const Solved s = solve_micro(mi, highs());
    REQUIRE(s.sol.accepted());
    auto x = s.sol.values;
    const int h = s.built.vars.h.begin()->second;
    x[static_cast<std::size_t>(h)] = 0.5;
    std::set<std::string> fams;
    for (const auto& v : audit(s.inst, s.built, x).violations) fams.insert(v.family);
    CHECK(fams.contains("integrality"));
    CHECK_THROWS(extract_schedule(s.inst, s.built, Solution{s.sol.status, 0, 0, x, "", {}}));
    x = s.sol.values;
    x[static_cast<std::size_t>(s.built.vars.yp.at(0))] = -1.0;
    fams.clear();
    for (const auto& v : audit(s.inst, s.built, x).violations) fams.insert(v.family);
    CHECK(fams.contains("bounds"));
  }

  TEST_CASE("model families are present") {
    const Solved s = solve_micro(random_micro(7), highs());
    const auto& m = s.built.model;
    for (const char* f : {"eq7", "eq11", "eq13", "eq15", "eq16", "eq17", "eq21", "eq24", "eq26"})
      CHECK_MESSAGE(m.count_rows(f) > 0, f);
    CHECK(m.count(VarKind::binary) > 0);
    std::set<std::string> names;
    for (const auto& c : m.cols) names.insert(c.name);
    CHECK(names.size() == m.cols.size());
  }

  TEST_CASE("LP text round trip") {
    MilpModel m;
    const int x = m.add_var("x", VarKind::integer, 0, 10);
    const int y = m.add_var("y", VarKind::continuous, 0, 4.5);
    m.add_row("eq7", "cap", {{x, 2.0}, {y, 1.0}}, Sense::le, 11.0);
    m.add_objective("revenues", x, 3.0);
    m.add_objective("revenues", y, 1.0);
    const std::string lp = write_lp(m);
    CHECK(lp.find("Maximize") != std::string::npos);
    CHECK(lp.find("General") != std::string::npos);
    CHECK(lp.find("cap:") != std::string::npos);

    const Solution direct = highs().solve(m, {});
    REQUIRE(direct.status == SolveStatus::optimal);
    // x = 5 uses 10 of the 11; y takes the last unit.
    CHECK(direct.objective == doctest::Approx(16.0));
    const Solution file = LpFileBackend(OOS_LP_SOLVE_BIN).solve(m, {});
    CHECK(file.status == SolveStatus::optimal);
    CHECK(file.objective == doctest::Approx(16.0));
    CHECK(file.values.at(0) == doctest::Approx(5.0));
    CHECK(file.values.at(1) == doctest::Approx(1.0));

    const Solution parsed = parse_solution_text("status optimal\nobjective 13.5\ngap 0\nx 3\n", m);
    CHECK(parsed.status == SolveStatus::optimal);
    CHECK(parsed.values == std::vector<double>{3.0, 0.0});
  }

  TEST_CASE("infeasible models report their status") {
    MilpModel m;
    const int x = m.add_var("x", VarKind::continuous, 0, 5);
    m.add_row("eq7", "low", {{x, 1.0}}, Sense::ge, 2.0);
    m.add_row("eq7", "high", {{x, 1.0}}, Sense::le, 1.0);
    const Solution s = highs().solve(m, {});
    CHECK(s.status == SolveStatus::infeasible);
    CHECK_FALSE(s.accepted());
    CHECK_FALSE(s.iis_rows.empty());
    CHECK(parse_status(to_string(SolveStatus::gap_stopped)) == SolveStatus::gap_stopped);
  }

  TEST_CASE("backend specs") {
    CHECK(make_backend("highs")->name() == "highs");
    auto lp = make_backend("lp:/bin/solver");
    CHECK(lp->name() == "lp");
    CHECK(dynamic_cast<const LpFileBackend&>(*lp).command() == "/bin/solver");
    CHECK_THROWS(make_backend("cplex"));
  }

  TEST_CASE("schedule export is stable JSON") {
    const Solved s = solve_micro(single_need(20e6, 3.0), highs());
    const Schedule sch = extract_schedule(s.inst, s.built, s.sol);
    const std::string a = export_schedule_json(sch);
    CHECK(a == export_schedule_json(extract_schedule(s.inst, s.built, s.sol)));
    const auto j = nlohmann::json::parse(a);
    CHECK(j.contains("events"));
    CHECK(j["outcomes"].size() == 1);
  }

  TEST_CASE("pinned starts are honoured") {
    MicroInstance mi = single_need(1e3, 3.0);  // not worth serving on its own
    InitialState st = initial_state_from_fleet(mi.scenario, 0);
    st.starts.push_back({0, "svc-1", 12});
    const auto inst = build_instance(mi.scenario, mi.catalog, mi.needs, st, 0, mi.horizon, PluginRegistry::with_defaults());
    const auto built = build_model(inst);
    const Solution sol = highs().solve(built.model, {});
    REQUIRE(sol.accepted());
    CHECK(audit(inst, built, sol.values).ok());
    const Schedule sch = extract_schedule(inst, built, sol);
    CHECK(sch.outcomes.at(0).served);
    CHECK(sch.outcomes.at(0).start_day == 12);
  }
}
