#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "oos/cli.hpp"
#include "oos/horizon.hpp"
#include "support/micro.hpp"

using namespace oos;
using namespace oos::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "oosplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path tmp(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("oos-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string cfg(const char* name) { return (source_dir() / "config" / name).string(); }
std::string catalog() { return (source_dir() / "data/catalog.csv").string(); }

std::vector<std::string> toy_plan(const fs::path& out) {
  return {"plan", "--scenario", cfg("case1.json"), "--catalog", catalog(), "--max-satellites", "5",
          "--horizon-days", "60", "--out", out.string()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"launch"}).code == kExitUsage);
    CHECK(cli({"plan", "--catalog", catalog()}).code == kExitUsage);
    CHECK(cli({"plan", "--scenario", cfg("case1.json"), "--catalog", catalog(), "--gap", "-1"}).code == kExitUsage);
    CHECK(cli({"plan", "--scenario", cfg("case1.json"), "--catalog", catalog(), "--backend", "cplex"}).code ==
          kExitUsage);
    CHECK(cli({"campaign", "--scenario", cfg("arch1.json"), "--catalog", catalog(), "--campaign-days", "365"}).code ==
          kExitUsage);
  }

  TEST_CASE("help exits 0") {
    const Run r = cli({"--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("plan") != std::string::npos);
    CHECK(r.out.find("campaign") != std::string::npos);
  }

  TEST_CASE("a missing input file is named") {
    const Run r = cli({"plan", "--scenario", "nope.json", "--catalog", catalog()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("nope.json") != std::string::npos);
    const Run c = cli({"plan", "--scenario", cfg("case1.json"), "--catalog", "missing.csv"});
    CHECK(c.code == kExitUsage);
    CHECK(c.err.find("missing.csv") != std::string::npos);
  }

  TEST_CASE("a malformed scenario is a usage error") {
    const fs::path bad = tmp("bad") / "bad.json";
    fs::create_directories(bad.parent_path());
    std::ofstream(bad) << "{\"name\": ";
    CHECK(cli({"plan", "--scenario", bad.string(), "--catalog", catalog()}).code == kExitUsage);
  }

  TEST_CASE("the process exit status matches") {
    const std::string bin = OOSPLAN_BIN;
    auto status = [](const std::string& cmd) {
      const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
      return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    CHECK(status(bin + " plan --scenario nope.json --catalog x.csv") == kExitUsage);
    CHECK(status(bin + " trajectory") == kExitOk);
    CHECK(status(bin + " trajectory --mode ht --tof-days 0.2") == kExitModel);
  }

  TEST_CASE("toy plan reports revenue and flight modes") {
    const fs::path out = tmp("toy");
    const Run r = cli(toy_plan(out));
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("status: optimal") != std::string::npos);
    CHECK(r.out.find("revenues: 10.000 M$") != std::string::npos);
    CHECK(r.out.find("flight modes: low_thrust/phasing") != std::string::npos);
    CHECK(r.out.find("needs served: 1 of 1") != std::string::npos);
    for (const char* f : {"schedule.json", "ledger.csv", "summary.json", "demand.csv"}) CHECK(fs::exists(out / f));
  }

  TEST_CASE("plan artifacts read back") {
    const fs::path out = tmp("artifacts");
    REQUIRE(cli(toy_plan(out)).code == kExitOk);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    const auto schedule = nlohmann::json::parse(slurp(out / "schedule.json"));
    const Ledger ledger = parse_ledger_csv(slurp(out / "ledger.csv"));
    REQUIRE(ledger.rows.size() == 2);
    CHECK(ledger.rows.back().day == 60);
    CHECK(ledger.rows.back().revenues == summary["components"]["revenues"].get<double>());
    CHECK(schedule["objective"].get<double>() == summary["objective"].get<double>());
    CHECK(ledger.rows.back().value ==
          doctest::Approx(summary["objective"].get<double>() - summary["initial_investment"].get<double>()));

    // Replaying the exported demand reproduces the schedule exactly.
    const fs::path again = tmp("replay");
    auto args = toy_plan(again);
    args.push_back("--demand");
    args.push_back((out / "demand.csv").string());
    REQUIRE(cli(args).code == kExitOk);
    CHECK(slurp(again / "schedule.json") == slurp(out / "schedule.json"));
  }

  TEST_CASE("LP export") {
    const fs::path out = tmp("lp");
    auto args = toy_plan(out);
    args.push_back("--export-lp");
    args.push_back((out / "model.lp").string());
    REQUIRE(cli(args).code == kExitOk);
    const std::string lp = slurp(out / "model.lp");
    CHECK(lp.rfind("\\", 0) == 0);
    CHECK(lp.find("Maximize") != std::string::npos);
    CHECK(lp.find("End") != std::string::npos);
  }

  TEST_CASE("trajectory curve for the eight-day half-orbit phasing") {
    const fs::path csv = tmp("traj") / "lt.csv";
    const Run r = cli({"trajectory", "--out", csv.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("M_ub_kg: 3137.871") != std::string::npos);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "m0_kg,mp_kg");
    int rows = 0;
    double last_m0 = 0;
    while (std::getline(in, line)) {
      ++rows;
      last_m0 = std::stod(line.substr(0, line.find(',')));
    }
    CHECK(rows == 20);
    CHECK(last_m0 == doctest::Approx(3137.871).epsilon(1e-6));
  }

  TEST_CASE("high-thrust trajectory report") {
    const Run r = cli({"trajectory", "--mode", "ht", "--tof-days", "2", "--isp", "316"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.find("688.579") != std::string::npos);
    CHECK(r.out.rfind("m0_kg,mp_kg", 0) == 0);
  }

  TEST_CASE("campaign artifacts") {
    const fs::path out = tmp("campaign");
    const Run r = cli({"campaign", "--scenario", cfg("arch1.json"), "--catalog", catalog(), "--max-satellites", "3",
                       "--campaign-days", "60", "--seed", "4", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("day 50-60") != std::string::npos);
    const Ledger l = parse_ledger_csv(slurp(out / "ledger.csv"));
    CHECK(l.rows.size() == 7);
    const auto windows = nlohmann::json::parse(slurp(out / "windows.json"));
    CHECK(windows.size() == 6);
    std::istringstream value(slurp(out / "value.csv"));
    std::string line;
    std::getline(value, line);
    CHECK(line == "day,value");
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["final"]["value"].get<double>() == l.last().value);
  }

  TEST_CASE("servicer mass sweep writes one ledger per mass") {
    const fs::path out = tmp("sweep");
    const Run r = cli({"campaign", "--scenario", cfg("arch5.json"), "--catalog", catalog(), "--max-satellites", "2",
                       "--campaign-days", "30", "--servicer-dry-mass", "3000,4000,5000,6000", "--jobs", "2", "--quiet",
                       "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    for (const char* m : {"3000", "4000", "5000", "6000"}) {
      const fs::path ledger = out / (std::string("dry_mass_") + m) / "ledger.csv";
      CHECK_MESSAGE(fs::exists(ledger), ledger.string());
      const auto summary = nlohmann::json::parse(slurp(ledger.parent_path() / "summary.json"));
      CHECK(summary["final"]["day"] == 30);
    }
  }
}
