#include <cmath>
#include <map>

#include "doctest.h"
#include "oos/demand.hpp"
#include "support/micro.hpp"

using namespace oos;
using namespace oos::testing;

namespace {

const Scenario& case1() {
  static const Scenario sc = load_scenario(source_dir() / "config/case1.json");
  return sc;
}

std::vector<CustomerSat> first(std::size_t n) {
  auto cat = load_catalog(source_dir() / "data/catalog.csv");
  cat.resize(n);
  return cat;
}

}  // namespace

TEST_SUITE("demand") {
  TEST_CASE("same seed, same stream") {
    const auto sats = first(30);
    const auto a = generate_demand(sats, case1(), 1830, 42);
    const auto b = generate_demand(sats, case1(), 1830, 42);
    CHECK(a.needs == b.needs);
    CHECK_FALSE(a.needs.empty());
    const auto c = generate_demand(sats, case1(), 1830, 43);
    CHECK_FALSE(a.needs == c.needs);
  }

  TEST_CASE("needs are sorted and numbered") {
    const auto ds = generate_demand(first(20), case1(), 1830, 1);
    for (std::size_t i = 0; i < ds.needs.size(); ++i) {
      CHECK(ds.needs[i].id == static_cast<int>(i));
      if (i > 0) CHECK(ds.needs[i - 1].occurrence <= ds.needs[i].occurrence);
      CHECK(ds.needs[i].occurrence >= 0.0);
      CHECK(ds.needs[i].occurrence < 1830.0);
    }
  }

  TEST_CASE("a satellite's stream does not depend on the rest of the catalog") {
    const auto small = generate_demand(first(3), case1(), 1830, 9);
    const auto big = generate_demand(first(40), case1(), 1830, 9);
    auto key = [](const ServiceNeed& n) { return std::make_tuple(n.satellite, n.type, n.occurrence); };
    std::vector<std::tuple<std::string, std::string, double>> a, b;
    for (const auto& n : small.needs) a.push_back(key(n));
    for (const auto& n : big.needs)
      if (n.sat_index < 3) b.push_back(key(n));
    CHECK(a == b);
  }

  TEST_CASE("deterministic needs repeat at their frequency") {
    ServiceTypeSpec spec = case1().service("refueling");
    const auto needs = generate_deterministic(first(10), spec, 10000, 5);
    std::map<std::string, std::vector<double>> per_sat;
    for (const auto& n : needs) per_sat[n.satellite].push_back(n.occurrence);
    CHECK(per_sat.size() == 10);
    for (const auto& [sat, occ] : per_sat) {
      CHECK(occ.front() < spec.occurrence_days);
      for (std::size_t i = 1; i < occ.size(); ++i) CHECK(occ[i] - occ[i - 1] == doctest::Approx(spec.occurrence_days));
    }
  }

  TEST_CASE("random inter-arrival times have the configured mean") {
    ServiceTypeSpec spec = case1().service("repositioning");
    spec.occurrence_days = 50;
    const auto needs = generate_random(first(40), spec, 20000, 3);
    std::map<int, double> last;
    double sum = 0.0, sumsq = 0.0;
    int n = 0;
    for (const auto& nd : needs) {
      const double gap = nd.occurrence - last[nd.sat_index];
      last[nd.sat_index] = nd.occurrence;
      sum += gap;
      sumsq += gap * gap;
      ++n;
    }
    REQUIRE(n > 10000);
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    // Exponential gaps: mean equals standard deviation.  Six standard errors.
    CHECK(std::abs(mean - 50.0) < 6 * 50.0 / std::sqrt(n));
    CHECK(std::abs(sd - 50.0) < 0.05 * 50.0);
  }

  TEST_CASE("generators reject the wrong occurrence kind") {
    CHECK_THROWS(generate_random(first(2), case1().service("refueling"), 100, 0));
    CHECK_THROWS(generate_deterministic(first(2), case1().service("repair"), 100, 0));
  }

  TEST_CASE("need fields come from the service type") {
    const auto n = make_need(7, {"X", 12.0}, 3, case1().service("repair"), 44.5);
    CHECK(n.id == 7);
    CHECK(n.sat_index == 3);
    CHECK(n.kind == OccurrenceKind::random);
    CHECK(n.revenue == 30e6);
    CHECK(n.demand.at("spares") == -50.0);
    CHECK(n.tool == "T3");
    CHECK(n.window == 30.0);
  }

  TEST_CASE("CSV replay reproduces the stream") {
    const auto sats = first(15);
    const auto ds = generate_demand(sats, case1(), 1830, 77);
    const auto text = export_demand_csv(ds);
    const auto back = import_demand_csv(text, sats, case1());
    CHECK(back.needs == ds.needs);
    CHECK(export_demand_csv(back) == text);
  }

  TEST_CASE("CSV replay errors carry the line") {
    const auto sats = first(2);
    const std::string head = "need_id,satellite,type,tau_day\n";
    auto line_of = [&](const std::string& body) -> std::size_t {
      try {
        (void)import_demand_csv(head + body, sats, case1());
      } catch (const ParseError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("0," + sats[0].name + ",repair,5\n1,nowhere,repair,6\n") == 3);
    CHECK(line_of("0," + sats[0].name + ",juggling,5\n") == 2);
    CHECK(line_of("0," + sats[0].name + ",repair,soon\n") == 2);
    CHECK_THROWS_AS(import_demand_csv("id,sat\n", sats, case1()), ParseError);
  }

  TEST_CASE("start window and coverage on the grid") {
    const TimeGrid g = build_time_grid(10, {2, 4}, 34);
    ServiceNeed n;
    n.occurrence = 3.5;
    n.window = 12;
    n.duration = 10;
    const auto w = build_window(n, g);
    // Steps on days 4, 10, 12 and 14 lie in [3.5, 15.5).
    CHECK(w == std::vector<int>{2, 3, 4, 5});
    CHECK(earliest_start(n, g) == 4);
    const auto beta = build_beta(n, g, w);
    CHECK(beta.at(2) == std::vector<int>{2, 3, 4});  // days 4, 10, 12
    CHECK(beta.at(5) == std::vector<int>{5, 6, 7});  // days 14, 20, 22
    n.occurrence = 25;
    CHECK(build_window(n, g) == std::vector<int>{9, 10, 11});
    CHECK(earliest_start(n, g) == 30);
    n.occurrence = 40;
    CHECK(build_window(n, g).empty());
  }

  TEST_CASE("a need arising on a step may start on it") {
    const TimeGrid g = build_time_grid(10, {2, 4}, 34);
    ServiceNeed n;
    n.occurrence = 10;
    n.window = 2;
    CHECK(build_window(n, g) == std::vector<int>{3});
  }

  TEST_CASE("tool flags and window unions") {
    const auto flags = tool_flags(case1().service("repair"), case1().tool_ids());
    CHECK(flags == std::vector<bool>{false, false, true, false});
    ServiceTypeSpec odd = case1().service("repair");
    odd.required_tool = "T7";
    CHECK_THROWS(tool_flags(odd, case1().tool_ids()));
    CHECK(window_union({{1, 2, 3}, {3, 5}, {}}) == std::set<int>{1, 2, 3, 5});
  }
}
