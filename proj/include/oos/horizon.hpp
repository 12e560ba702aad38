#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oos/demand.hpp"
#include "oos/milp/audit.hpp"
#include "oos/milp/instance.hpp"
#include "oos/milp/schedule.hpp"
#include "oos/milp/solve.hpp"

namespace oos {

enum class ReplanTrigger { periodic, on_random_need };

std::string to_string(ReplanTrigger t);

struct RhConfig {
  int campaign_days = 1830;
  int window_days = 90;
  int commit_days = 10;
  ReplanTrigger trigger = ReplanTrigger::periodic;
  SolveOptions solver;
  std::uint64_t seed = 0;
  std::optional<int> breakpoints;
  bool terminal_reserve = true;
  bool audit = true;
};

/// Throws std::invalid_argument unless commit <= window, the campaign is a
/// whole number of commits and commits are whole grid periods.
void validate(const RhConfig& cfg, const Scenario& scenario);

struct LedgerRow {
  int day = 0;
  double revenues = 0.0;
  double launch = 0.0;
  double pdm = 0.0;
  double delay = 0.0;
  double depot_ops = 0.0;
  double servicer_ops = 0.0;
  double value = 0.0;
};

/// Cumulative financial timeline.  value = revenues - initial investment -
/// (launch + pdm + delay + depot_ops + servicer_ops) at every row.
struct Ledger {
  double initial_investment = 0.0;
  std::vector<LedgerRow> rows;

  static double value_of(const LedgerRow& r, double investment);
  /// Starts the timeline with the day-0 row.
  void open(int day, double investment);
  /// Appends a row at `day` adding `components` to the running totals.
  void accrue(int day, const std::map<std::string, double>& components);
  const LedgerRow& last() const { return rows.back(); }
  std::string to_csv() const;
};

Ledger parse_ledger_csv(const std::string& text);

struct WorldState {
  int day = 0;
  InitialState state;
  std::set<int> handled;  // needs served or given up in committed intervals
  Ledger ledger;
};

WorldState initial_world(const Scenario& scenario);

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Needs the planner may see from `world.day`: deterministic needs arising
/// before the window end, random needs already revealed, not yet handled and
/// still open, plus every need with a pinned start.
std::vector<ServiceNeed> window_demand(const DemandStream& stream, const WorldState& world, int window_days);

struct StepResult {
  int start_day = 0;
  int commit_day = 0;
  Solution solution;
  Schedule schedule;
  std::map<std::string, double> accrued;  // components realized in [start, commit)
  std::vector<std::string> warnings;
  WorldState next;
};

struct StepContext {
  const Scenario& scenario;
  const std::vector<CustomerSat>& catalog;
  const DemandStream& stream;
  const PluginRegistry& registry;
  const Backend& backend;
  const RhConfig& cfg;
};

/// Solves the window starting at world.day, commits its decisions up to the
/// next replanning day and returns the resulting state.
StepResult step(const StepContext& ctx, const WorldState& world, const std::vector<ServiceNeed>& visible);

/// Commit end of the window starting at `day`.
int commit_day(const RhConfig& cfg, const Scenario& scenario, const DemandStream& stream, int day);

struct WindowRecord {
  int start_day = 0;
  int commit_day = 0;
  std::string status;
  double objective = 0.0;
  Schedule schedule;
  std::vector<std::string> warnings;
};

struct CampaignResult {
  Ledger ledger;
  std::vector<WindowRecord> windows;
  DemandStream stream;
};

/// Runs the whole campaign.  `progress`, when set, is called after every window.
CampaignResult run_campaign(const RhConfig& cfg, const Scenario& scenario, const std::vector<CustomerSat>& catalog,
                            const DemandStream& stream, const PluginRegistry& registry, const Backend& backend,
                            const std::function<void(const StepResult&)>& progress = {});

/// Summary JSON (sorted keys) of a finished campaign.
std::string campaign_summary_json(const CampaignResult& r, const RhConfig& cfg, const Scenario& scenario);

}  // namespace oos
