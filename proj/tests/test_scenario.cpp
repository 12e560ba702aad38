#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "oos/scenario.hpp"
#include "support/micro.hpp"

using namespace oos;
using nlohmann::json;

namespace {

json case1_json() { return json::parse(serialize_scenario(load_scenario(testing::source_dir() / "config/case1.json"))); }

json& design(json& j, const std::string& id) {
  for (auto& d : j["designs"])
    if (d["id"] == id) return d;
  throw std::runtime_error("no design " + id);
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("serialized scenarios parse back unchanged") {
    for (const char* f : {"case1.json", "arch1.json", "arch3.json", "arch6.json", "multimodal.json"}) {
      const Scenario sc = load_scenario(testing::source_dir() / "config" / f);
      CHECK(parse_scenario(serialize_scenario(sc)) == sc);
    }
  }

  TEST_CASE("extends merges the base file underneath") {
    const Scenario a1 = load_scenario(testing::source_dir() / "config/arch1.json");
    const Scenario base = load_scenario(testing::source_dir() / "config/high_thrust.json");
    CHECK(a1.name == "arch1");
    CHECK(a1.designs == base.designs);
    CHECK(a1.fleet == base.fleet);
    CHECK(a1.commodity("xenon").purchase_cost == 1115.0);
    CHECK(a1.service("repair").revenue == 30e6);
  }

  TEST_CASE("extends chain resolves relative to the including file") {
    const auto dir = std::filesystem::temp_directory_path() / "oos-scenario-extends";
    std::filesystem::create_directories(dir / "sub");
    std::ofstream(dir / "sub/child.json") << R"({"extends": "../base.json", "name": "child", "grid": {"period_days": 20}})";
    std::ofstream(dir / "base.json") << serialize_scenario(load_scenario(testing::source_dir() / "config/case1.json"));
    const Scenario sc = load_scenario(dir / "sub/child.json");
    CHECK(sc.name == "child");
    CHECK(sc.grid.period == 20);
    CHECK(sc.grid.offsets == std::vector<int>{2, 4});
  }

  TEST_CASE("Case 1 inputs") {
    const Scenario sc = load_scenario(testing::source_dir() / "config/case1.json");
    CHECK(sc.economics.launch_cost_per_kg == 11300.0);
    CHECK(sc.commodity("biprop").purchase_cost == 180.0);
    CHECK(sc.commodity("T1").unit_mass == 100.0);
    CHECK(sc.tool_ids() == std::vector<std::string>{"T1", "T2", "T3", "T4"});
    CHECK(sc.service("station_keeping").duration == 180.0);
    CHECK(sc.grid.period == 10);
  }

  TEST_CASE("invalid scenarios name the violation") {
    auto rejects = [](json j, const std::string& needle) {
      try {
        (void)parse_scenario(j.dump());
      } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
        return;
      }
      FAIL("accepted an invalid scenario, expected: " << needle);
    };
    {
      json j = case1_json();
      design(j, "mm_versatile")["dry_mass"] = -1.0;
      rejects(j, "dry");
    }
    {
      json j = case1_json();
      design(j, "mm_versatile")["propulsion"][0]["propellant"] = "kerosene";
      rejects(j, "kerosene");
    }
    {
      json j = case1_json();
      j["fleet"][1]["design"] = "nope";
      rejects(j, "nope");
    }
    {
      json j = case1_json();
      for (auto& s : j["services"])
        if (s["id"] == "repair") s["tool"] = "T9";
      rejects(j, "T9");
    }
  }

  TEST_CASE("malformed JSON is a parse error") {
    CHECK_THROWS_AS((void)parse_scenario("{\"name\": "), ParseError);
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/scenario.json"), std::exception);
  }

  TEST_CASE("catalog longitudes are normalized") {
    const auto sats = parse_catalog("name,longitude_deg\nA,190\nB,-180\n\"C, D\",45.5\n");
    REQUIRE(sats.size() == 3);
    CHECK(sats[0].longitude == doctest::Approx(-170.0));
    CHECK(sats[1].longitude == doctest::Approx(180.0));
    CHECK(sats[2].name == "C, D");
    CHECK(normalize_longitude(540.0) == doctest::Approx(180.0));
    CHECK(normalize_longitude(-190.0) == doctest::Approx(170.0));
  }

  TEST_CASE("catalog errors carry the line number") {
    try {
      (void)parse_catalog("name,longitude_deg\nA,10\nB,east\n");
      FAIL("accepted a non-numeric longitude");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("shipped catalog") {
    const auto sats = load_catalog(testing::source_dir() / "data/catalog.csv");
    CHECK(sats.size() == 142);
    for (const auto& s : sats) {
      CHECK(s.longitude > -180.0);
      CHECK(s.longitude <= 180.0);
    }
  }

  TEST_CASE("initial investment counts vehicles that start in orbit") {
    const Scenario sc = load_scenario(testing::source_dir() / "config/case1.json");
    double expect = 0.0;
    for (const auto& f : sc.fleet)
      if (f.pre_deployed()) expect += sc.design(f.design).manufacturing_cost;
    CHECK(sc.initial_investment() == expect);
    CHECK(expect > 0.0);
  }
}
