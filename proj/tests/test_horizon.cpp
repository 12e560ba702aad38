#include "doctest.h"
#include "oos/horizon.hpp"
#include "support/micro.hpp"

using namespace oos;
using namespace oos::testing;

namespace {

const Scenario& arch1() {
  static const Scenario sc = load_scenario(source_dir() / "config/arch1.json");
  return sc;
}

const HighsBackend& highs() {
  static const HighsBackend b;
  return b;
}

RhConfig short_campaign(int days) {
  RhConfig cfg;
  cfg.campaign_days = days;
  cfg.solver.mip_gap = 0.0;
  return cfg;
}

void check_identity(const Ledger& l) {
  for (const auto& r : l.rows)
    CHECK(r.value == r.revenues - l.initial_investment - (r.launch + r.pdm + r.delay + r.depot_ops + r.servicer_ops));
}

}  // namespace

TEST_SUITE("horizon") {
  TEST_CASE("ledger values follow the identity") {
    Ledger l;
    l.open(0, 275e6);
    CHECK(l.last().value == -275e6);
    l.accrue(10, {{"revenues", 20e6}, {"servicer_ops", 130e3}, {"depot_ops", 130e3}});
    l.accrue(20, {{"launch", 4.5e6}, {"pdm", 1.2e6}, {"delay", 3e5}});
    REQUIRE(l.rows.size() == 3);
    CHECK(l.rows[2].revenues == 20e6);
    CHECK(l.rows[2].servicer_ops == 130e3);
    check_identity(l);
  }

  TEST_CASE("Case 1 profit arithmetic") {
    Ledger l;
    l.open(0, 0.0);
    l.accrue(90, {{"revenues", 75e6}, {"launch", 9.1e6}, {"pdm", 2.4e6}, {"delay", 1.4e6}, {"depot_ops", 1.17e6},
                  {"servicer_ops", 2.13e6}});
    CHECK(l.last().value == 58.8e6);
  }

  TEST_CASE("ledger CSV round trip is exact") {
    Ledger l;
    l.open(0, 1.0 / 3.0);
    l.accrue(10, {{"revenues", 0.1}, {"pdm", 0.2}});
    const Ledger back = parse_ledger_csv(l.to_csv());
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[1].revenues == 0.1);
    CHECK(back.rows[1].value == l.rows[1].value);
    CHECK(back.initial_investment == l.initial_investment);
    CHECK(back.to_csv() == l.to_csv());
    CHECK_THROWS_AS(parse_ledger_csv("day,value\n"), ParseError);
  }

  TEST_CASE("configuration checks") {
    RhConfig cfg;
    CHECK_NOTHROW(validate(cfg, arch1()));
    cfg.commit_days = 15;
    CHECK_THROWS(validate(cfg, arch1()));
    cfg.commit_days = 100;
    CHECK_THROWS(validate(cfg, arch1()));
    cfg.commit_days = 10;
    cfg.campaign_days = 365;
    CHECK_THROWS(validate(cfg, arch1()));
    cfg.campaign_days = 370;
    CHECK_NOTHROW(validate(cfg, arch1()));
  }

  TEST_CASE("visible demand") {
    const CustomerSat sat{"S", 20.0};
    DemandStream ds;
    ds.needs = {make_need(0, sat, 0, arch1().service("refueling"), 50.0),
                make_need(1, sat, 0, arch1().service("refueling"), 150.0),
                make_need(2, sat, 0, arch1().service("repair"), 35.0),
                make_need(3, sat, 0, arch1().service("repair"), 45.0),
                make_need(4, sat, 0, arch1().service("repair"), 5.0)};
    WorldState w = initial_world(arch1());
    w.day = 40;
    auto ids = [](const std::vector<ServiceNeed>& v) {
      std::vector<int> out;
      for (const auto& n : v) out.push_back(n.id);
      return out;
    };
    // Deterministic needs inside the window, random needs already revealed, open windows only.
    CHECK(ids(window_demand(ds, w, 90)) == std::vector<int>{0, 2});
    w.handled.insert(0);
    CHECK(ids(window_demand(ds, w, 90)) == std::vector<int>{2});
    w.state.starts.push_back({4, "servicer-1", 42});
    CHECK(ids(window_demand(ds, w, 90)) == std::vector<int>{2, 4});
    w.day = 120;
    w.state.starts.clear();
    CHECK(ids(window_demand(ds, w, 90)) == std::vector<int>{1});
  }

  TEST_CASE("commit days") {
    const CustomerSat sat{"S", 20.0};
    DemandStream ds;
    ds.needs = {make_need(0, sat, 0, arch1().service("repair"), 57.3)};
    RhConfig cfg;
    cfg.campaign_days = 200;
    CHECK(commit_day(cfg, arch1(), ds, 40) == 50);
    CHECK(commit_day(cfg, arch1(), ds, 195) == 200);
    cfg.trigger = ReplanTrigger::on_random_need;
    // Replan on the first period boundary after the next random need.
    CHECK(commit_day(cfg, arch1(), ds, 0) == 60);
    CHECK(commit_day(cfg, arch1(), ds, 60) == 140);
  }

  TEST_CASE("a campaign with no customers only loses money") {
    const RhConfig cfg = short_campaign(100);
    const auto res = run_campaign(cfg, arch1(), {}, DemandStream{}, PluginRegistry::with_defaults(), highs());
    REQUIRE(res.ledger.rows.size() == 11);
    CHECK(res.ledger.rows.front().value == -arch1().initial_investment());
    for (std::size_t i = 1; i < res.ledger.rows.size(); ++i) {
      const auto& r = res.ledger.rows[i];
      CHECK(r.value < res.ledger.rows[i - 1].value);
      CHECK(r.day == static_cast<int>(10 * i));
      // Idle: only operations accrue.
      CHECK(r.revenues == 0.0);
      CHECK(r.launch == 0.0);
      CHECK(r.delay == 0.0);
      CHECK(r.depot_ops > 0.0);
      CHECK(r.servicer_ops > 0.0);
    }
    check_identity(res.ledger);
  }

  TEST_CASE("one need mid-campaign raises the value") {
    const RhConfig cfg = short_campaign(100);
    const std::vector<CustomerSat> sats{{"S", -150.0}};
    DemandStream ds;
    ds.needs = {make_need(0, sats[0], 0, arch1().service("inspection"), 33.0)};
    const auto reg = PluginRegistry::with_defaults();
    const auto with = run_campaign(cfg, arch1(), sats, ds, reg, highs());
    const auto without = run_campaign(cfg, arch1(), sats, DemandStream{}, reg, highs());
    check_identity(with.ledger);
    const auto& a = with.ledger.last();
    const auto& b = without.ledger.last();
    CHECK(a.revenues - b.revenues == arch1().service("inspection").revenue);
    // The jump is the revenue less what serving it cost.
    const double extra_cost = (a.launch + a.pdm + a.delay + a.depot_ops + a.servicer_ops) -
                              (b.launch + b.pdm + b.delay + b.depot_ops + b.servicer_ops);
    CHECK(a.value - b.value == doctest::Approx(a.revenues - b.revenues - extra_cost));
    CHECK(a.value > b.value);
    for (std::size_t i = 0; i < with.ledger.rows.size(); ++i)
      if (with.ledger.rows[i].day <= 30) CHECK(with.ledger.rows[i].revenues == 0.0);
  }

  TEST_CASE("campaigns are deterministic") {
    const RhConfig cfg = short_campaign(150);
    auto sats = load_catalog(source_dir() / "data/catalog.csv");
    sats.resize(4);
    const auto ds = generate_demand(sats, arch1(), cfg.campaign_days, 21);
    const auto reg = PluginRegistry::with_defaults();
    const auto a = run_campaign(cfg, arch1(), sats, ds, reg, highs());
    const auto b = run_campaign(cfg, arch1(), sats, ds, reg, highs());
    CHECK(a.ledger.to_csv() == b.ledger.to_csv());
    CHECK(campaign_summary_json(a, cfg, arch1()) == campaign_summary_json(b, cfg, arch1()));
    REQUIRE(a.windows.size() == b.windows.size());
    for (std::size_t i = 0; i < a.windows.size(); ++i)
      CHECK(export_schedule_json(a.windows[i].schedule) == export_schedule_json(b.windows[i].schedule));
    check_identity(a.ledger);
  }

  TEST_CASE("a step hands its state to the next window") {
    const RhConfig cfg = short_campaign(100);
    const std::vector<CustomerSat> sats{{"S", -150.0}};
    DemandStream ds;
    ds.needs = {make_need(0, sats[0], 0, arch1().service("inspection"), 3.0)};
    const auto reg = PluginRegistry::with_defaults();
    const StepContext ctx{arch1(), sats, ds, reg, highs(), cfg};
    WorldState w = initial_world(arch1());
    int started = -1;
    while (w.day < cfg.campaign_days && started < 0) {
      const StepResult r = step(ctx, w, window_demand(ds, w, cfg.window_days));
      CHECK(r.next.day == r.commit_day);
      CHECK(r.next.ledger.rows.size() == w.ledger.rows.size() + 1);
      // Every vehicle is somewhere: parked, in flight, or on site.
      std::set<std::string> seen;
      for (const auto& inj : r.next.state.injections)
        if (!inj.vehicle.empty()) seen.insert(inj.vehicle);
      CHECK(seen.contains("servicer-1"));
      CHECK(seen.contains("depot-1"));
      for (const auto& o : r.schedule.outcomes)
        if (o.served && o.start_day < r.commit_day) started = o.start_day;
      if (started >= 0) {
        CHECK(r.next.handled.contains(0));
        if (started + 10 > r.commit_day) {
          REQUIRE(r.next.state.coverage.size() == 1);
          CHECK(r.next.state.coverage[0].to_day == started + 10);
        }
      }
      w = r.next;
    }
    CHECK(started >= 4);
  }
}
