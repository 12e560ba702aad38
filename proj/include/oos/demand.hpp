#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oos/network.hpp"
#include "oos/scenario.hpp"

namespace oos {

/// One demand instance.  `occurrence` is the raw day the need arises;
/// `demand` holds nonpositive amounts per commodity.
struct ServiceNeed {
  int id = 0;
  std::string satellite;
  int sat_index = 0;  // position in the catalog
  std::string type;
  OccurrenceKind kind = OccurrenceKind::deterministic;
  double occurrence = 0.0;
  double window = 0.0;    // days
  double duration = 0.0;  // days
  double revenue = 0.0;
  double delay_penalty = 0.0;  // $/day
  std::map<std::string, double> demand;
  std::string tool;

  bool operator==(const ServiceNeed&) const = default;
};

struct DemandStream {
  std::uint64_t seed = 0;
  std::vector<ServiceNeed> needs;  // sorted by occurrence

  /// Needs grouped by satellite name.
  std::map<std::string, std::vector<int>> by_satellite() const;
};

/// Fresh generator for (seed, service type, satellite).  Streams never
/// depend on the order in which satellites are generated.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& type, int sat_index);

/// Uniform double in [0, 1) built from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits);

std::vector<ServiceNeed> generate_deterministic(const std::vector<CustomerSat>& sats, const ServiceTypeSpec& spec,
                                                double horizon, std::uint64_t seed);
std::vector<ServiceNeed> generate_random(const std::vector<CustomerSat>& sats, const ServiceTypeSpec& spec,
                                         double horizon, std::uint64_t seed);

/// Deterministic needs from a given per-satellite phase instead of a drawn one.
std::vector<ServiceNeed> generate_deterministic_with_phase(const std::vector<CustomerSat>& sats,
                                                           const ServiceTypeSpec& spec, double horizon,
                                                           double phase);

/// All service types over [0, horizon), sorted and numbered.
DemandStream generate_demand(const std::vector<CustomerSat>& sats, const Scenario& scenario, double horizon,
                             std::uint64_t seed);

/// Grid steps (as step indices) at which the need may start: steps in
/// [snap_up(occurrence), occurrence + window).
std::vector<int> build_window(const ServiceNeed& need, const TimeGrid& grid);

/// Earliest start day on the periodic pattern; the delay reference.
int earliest_start(const ServiceNeed& need, const TimeGrid& grid);

/// For every start step tau, the steps t with tau <= t < tau + duration.
std::map<int, std::vector<int>> build_beta(const ServiceNeed& need, const TimeGrid& grid,
                                           const std::vector<int>& window);

/// One flag per tool id: true for the tool the service type requires.
std::vector<bool> tool_flags(const ServiceTypeSpec& spec, const std::vector<std::string>& tool_ids);

/// Union of the windows of needs at one satellite.
std::set<int> window_union(const std::vector<std::vector<int>>& windows);

/// Replay file: `need_id,satellite,type,tau_day`.
std::string export_demand_csv(const DemandStream& stream);
DemandStream import_demand_csv(const std::string& text, const std::vector<CustomerSat>& sats,
                               const Scenario& scenario);

/// Fills type-derived fields of a need from its service type.
ServiceNeed make_need(int id, const CustomerSat& sat, int sat_index, const ServiceTypeSpec& spec,
                      double occurrence);

}  // namespace oos
