#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oos {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModel = 1;  // infeasible, solver failure, failed audit
inline constexpr int kExitUsage = 2;  // bad flags, missing or unreadable files

/// Bad flags or inputs that cannot be read.  Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything one command needs.  Paths are checked by `check_manifest`.
struct RunManifest {
  std::string command;
  std::filesystem::path scenario;
  std::filesystem::path catalog;
  std::optional<std::filesystem::path> demand;  // replay file instead of generated needs
  std::optional<int> max_satellites;
  std::uint64_t seed = 0;
  std::optional<int> horizon_days;
  std::optional<double> gap;
  std::optional<double> time_limit;
  std::string backend = "highs";
  std::optional<int> breakpoints;
  std::optional<std::filesystem::path> export_lp;
  std::filesystem::path out = "out";
  // Terminal propellant reserve; plans default to off, campaigns to on.
  std::optional<bool> terminal_reserve;
  // campaign
  int campaign_days = 1830;
  int commit_days = 10;
  std::string trigger = "periodic";
  std::vector<double> servicer_dry_mass;
  int jobs = 1;
  bool quiet = false;
};

/// Throws UsageError naming the first missing file or out-of-range override.
void check_manifest(const RunManifest& m);

int cmd_plan(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_campaign(const RunManifest& m, std::ostream& out, std::ostream& err);

struct TrajectoryArgs {
  std::string mode = "lt";  // "ht" or "lt"
  double from_longitude = 180.0;
  double to_longitude = 0.0;
  double tof_days = 8.0;
  double thrust = 1.16;
  double isp = 1790.0;
  double radius_km = 42164.0;
  double mass_min = 500.0;
  double mass_max = 4000.0;
  int breakpoints = 20;
  bool graded = false;
  std::optional<std::filesystem::path> out;
};

int cmd_trajectory(const TrajectoryArgs& a, std::ostream& out, std::ostream& err);

/// Parses argv and runs one command.  Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oos
