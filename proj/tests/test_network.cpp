#include <array>
#include <map>
#include <set>

#include "doctest.h"
#include "oos/network.hpp"
#include "support/micro.hpp"

using namespace oos;
using namespace oos::testing;

namespace {

ServiceTypeSpec plain_service() {
  ServiceTypeSpec s;
  s.id = "svc";
  s.revenue = 1e6;
  s.duration = 10;
  s.window = 20;
  s.occurrence_days = 1000;
  s.required_tool = "T1";
  return s;
}

const std::vector<CustomerSat> kSats{{"C1", 40.0}, {"C2", -60.0}};

TrajectoryQuery query(const Scenario& sc, const PropulsionMode& m, double from, double to, int q) {
  TrajectoryQuery tq;
  tq.from_longitude = from;
  tq.to_longitude = to;
  tq.time_of_flight = q * 86400.0;
  tq.thrust = m.thrust;
  tq.isp = m.isp;
  tq.mass_min = sc.designs[0].dry_mass;
  tq.mass_max = max_total_mass(sc.designs[0], sc);
  return tq;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("grid is the periodic pattern inside the horizon") {
    const TimeGrid g = build_time_grid(10, {2, 4}, 34);
    CHECK(g.steps == std::vector<int>{0, 2, 4, 10, 12, 14, 20, 22, 24, 30, 32, 34});
    CHECK(g.size() == 12);
    CHECK(g.index_of(14) == 5);
    CHECK(g.index_of(15) == -1);
    CHECK(g.index_at_or_after(15) == 6);
    CHECK(g.index_at_or_after(35) == 12);
    CHECK(g.delta(2) == 6);
    CHECK(g.delta(11) == 0);
    CHECK(g.delta_prev(0) == 0);
    CHECK(g.delta_prev(3) == 6);
    CHECK(g.snap_up(4.5) == 10);
    CHECK(g.snap_up(4.0) == 4);
    CHECK(g.on_pattern(-8));
    CHECK_FALSE(g.on_pattern(-5));
  }

  TEST_CASE("grid with a shifted start") {
    const TimeGrid g = build_time_grid(10, {2, 4}, 20, 130);
    CHECK(g.steps == std::vector<int>{130, 132, 134, 140, 142, 144, 150});
    CHECK_THROWS(build_time_grid(10, {4, 2}, 30));
    CHECK_THROWS(build_time_grid(10, {10}, 30));
    CHECK_THROWS(build_time_grid(10, {2}, 5));
  }

  TEST_CASE("nodes put Earth first and reject duplicate names") {
    const NodeSet ns = NodeSet::make({{"P", 0.0}, {"Q", 370.0}}, kSats);
    CHECK(ns.size() == 5);
    CHECK(ns.kind(0) == NodeKind::earth);
    CHECK(ns.nodes[2].longitude == doctest::Approx(10.0));
    CHECK(*ns.find("C2") == 4);
    CHECK_FALSE(ns.find("C3").has_value());
    CHECK_FALSE(ns.is_orbital(0));
    CHECK_THROWS(NodeSet::make({{"C1", 0.0}}, kSats));
  }

  TEST_CASE("high-thrust arcs cover every feasible departure") {
    const Scenario sc = micro_scenario(MicroPropulsion::high_thrust, 2000, {{"biprop", 500}}, {plain_service()});
    const NodeSet ns = NodeSet::make(sc.parking, kSats);
    const TimeGrid g = build_time_grid(10, {2, 4}, 34);
    const DynamicNetwork net = expand(ns, g, sc, PluginRegistry::with_defaults());

    // Count independently: ordered pairs, durations, and departures whose
    // arrival day is on the grid, wherever a phasing orbit exists.
    std::size_t expect = 0;
    const auto& mode = sc.designs[0].propulsion[0];
    for (int i = 1; i < ns.size(); ++i)
      for (int j = 1; j < ns.size(); ++j) {
        if (i == j) continue;
        for (int q : mode.flight_durations) {
          const double alpha = phase_angle(ns.nodes[static_cast<std::size_t>(i)].longitude,
                                           ns.nodes[static_cast<std::size_t>(j)].longitude);
          if (ht_enumerate(alpha, 42164e3, q * 86400.0, 6578e3, 3.986004418e14).empty()) continue;
          for (int t = 0; t < g.size(); ++t) expect += g.index_of(g.day(t) + q) >= 0;
        }
      }
    CHECK(net.arcs.size() == expect);
    CHECK(net.holdovers.size() == 3 * 12);
    const double mtot = 2000 + 1000 + 400 + 100;
    CHECK(max_total_mass(sc.designs[0], sc) == mtot);
    for (const auto& a : net.arcs) {
      CHECK(g.day(a.arr) == g.day(a.dep) + a.q);
      CHECK(a.mass_upper_bound == mtot);
      REQUIRE(a.model >= 0);
      CHECK(net.models[static_cast<std::size_t>(a.model)].linear);
    }
    // One trajectory model per (pair, duration), shared by all departures.
    std::map<std::array<int, 3>, int> model_of;
    for (const auto& a : net.arcs) {
      auto [it, fresh] = model_of.emplace(std::array<int, 3>{a.from, a.to, a.q}, a.model);
      CHECK(it->second == a.model);
    }
    CHECK(net.models.size() == model_of.size());
  }

  TEST_CASE("equal phase geometry reuses a cached model") {
    const Scenario sc = micro_scenario(MicroPropulsion::high_thrust, 2000, {}, {plain_service()});
    // C1 -> C2 and P -> C1 are both 40 degree separations.
    const NodeSet ns = NodeSet::make(sc.parking, {{"C1", -40.0}, {"C2", -80.0}});
    const DynamicNetwork net = expand(ns, build_time_grid(10, {2, 4}, 34), sc, PluginRegistry::with_defaults());
    CHECK(net.model_cache_hits > 0);
  }

  TEST_CASE("low-thrust arcs carry the tighter of the two mass limits") {
    const Scenario sc = micro_scenario(MicroPropulsion::multimodal, 2500, {}, {plain_service()});
    const NodeSet ns = NodeSet::make(sc.parking, kSats);
    const DynamicNetwork net = expand(ns, build_time_grid(10, {2, 4}, 34), sc, PluginRegistry::with_defaults());
    const double mtot = max_total_mass(sc.designs[0], sc);
    CHECK(mtot == 2500 + 1000 + 400 + 300 + 100);
    const auto& lt = sc.designs[0].propulsion[1];
    std::set<int> kinds;
    for (const auto& a : net.arcs) {
      const auto& ro = net.routes[static_cast<std::size_t>(a.vehicle)][static_cast<std::size_t>(a.r)];
      kinds.insert(static_cast<int>(ro.kind));
      if (ro.kind != PropulsionKind::low_thrust) continue;
      const auto& from = ns.nodes[static_cast<std::size_t>(a.from)];
      const auto& to = ns.nodes[static_cast<std::size_t>(a.to)];
      const double mub = lt_mass_upper_bound(signed_phase_angle(from.longitude, to.longitude), a.q * 86400.0,
                                             42164e3, lt.thrust);
      CHECK(a.mass_upper_bound == doctest::Approx(std::min(mub, mtot)));
      const auto& m = net.models[static_cast<std::size_t>(a.model)];
      const auto ref = lt_model(query(sc, lt, from.longitude, to.longitude, a.q), sc.solver.breakpoints);
      CHECK(m.breakpoints.size() == ref.breakpoints.size());
      CHECK(m.breakpoints.back().mp == doctest::Approx(ref.breakpoints.back().mp));
    }
    CHECK(kinds.size() == 2);
  }

  TEST_CASE("installed tools count toward the flyable mass") {
    const Scenario with = micro_scenario(MicroPropulsion::high_thrust, 2000, {}, {plain_service()}, true);
    const Scenario without = micro_scenario(MicroPropulsion::high_thrust, 2000, {}, {plain_service()}, false);
    CHECK(max_total_mass(with.designs[0], with) - max_total_mass(without.designs[0], without) == 100.0);
  }

  TEST_CASE("restrictions prune customer holdovers and arcs") {
    const Scenario sc = micro_scenario(MicroPropulsion::high_thrust, 2000, {}, {plain_service()});
    const NodeSet ns = NodeSet::make(sc.parking, {kSats[0]});
    const TimeGrid g = build_time_grid(10, {2, 4}, 34);
    ExpandOptions eo;
    eo.restrictions.customer_arrivals[2] = {g.index_of(12)};
    eo.restrictions.customer_departures[2] = {g.index_of(22)};
    eo.restrictions.customer_holdovers[2] = {g.index_of(12), g.index_of(14), g.index_of(20)};
    const DynamicNetwork net = expand(ns, g, sc, PluginRegistry::with_defaults(), eo);
    int customer_holds = 0;
    for (const auto& h : net.holdovers)
      if (h.node == 2) {
        ++customer_holds;
        CHECK((g.day(h.step) == 12 || g.day(h.step) == 14 || g.day(h.step) == 20 || h.step == g.size() - 1));
      }
    CHECK(customer_holds == 4);
    for (const auto& a : net.arcs) {
      if (a.to == 2) CHECK(g.day(a.arr) == 12);
      if (a.from == 2) CHECK(g.day(a.dep) == 22);
    }
    CHECK_FALSE(net.arcs_in(0, 2, g.index_of(12)).empty());
    CHECK(net.holdover_at(0, 2, g.index_of(4)) == -1);
    CHECK(net.holdover_at(0, 2, g.index_of(14)) >= 0);
  }

  TEST_CASE("durations that never land on the grid are rejected") {
    Scenario sc = micro_scenario(MicroPropulsion::high_thrust, 2000, {}, {plain_service()});
    sc.designs[0].propulsion[0].flight_durations = {3};
    CHECK_THROWS_AS(expand(NodeSet::make(sc.parking, kSats), build_time_grid(10, {2, 4}, 34), sc,
                           PluginRegistry::with_defaults()),
                    std::invalid_argument);
  }

  TEST_CASE("launch arcs follow the launcher cadence") {
    const Scenario sc = load_scenario(source_dir() / "config/case1.json");
    const NodeSet ns = NodeSet::make(sc.parking, {});
    const TimeGrid g = build_time_grid(sc.grid.period, sc.grid.offsets, 90);
    const DynamicNetwork net = expand(ns, g, sc, PluginRegistry::with_defaults());
    std::set<int> days;
    for (const auto& a : net.arcs)
      if (a.launch()) {
        days.insert(g.day(a.dep));
        CHECK(a.from == ns.earth());
        CHECK(a.q == sc.economics.launch_duration);
      }
    CHECK(days == std::set<int>{0, 30, 60});
    CHECK(net.count_arcs(VehicleClass::launcher) == 3 * sc.parking.size());
  }
}
