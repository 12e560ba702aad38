#include "oos/demand.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "oos/text.hpp"

namespace oos {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::map<std::string, std::vector<int>> DemandStream::by_satellite() const {
  std::map<std::string, std::vector<int>> out;
  for (std::size_t i = 0; i < needs.size(); ++i) out[needs[i].satellite].push_back(static_cast<int>(i));
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& type, int sat_index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(type));
  return splitmix64(h ^ static_cast<std::uint64_t>(sat_index));
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

ServiceNeed make_need(int id, const CustomerSat& sat, int sat_index, const ServiceTypeSpec& spec,
                      double occurrence) {
  ServiceNeed n;
  n.id = id;
  n.satellite = sat.name;
  n.sat_index = sat_index;
  n.type = spec.id;
  n.kind = spec.occurrence;
  n.occurrence = occurrence;
  n.window = spec.window;
  n.duration = spec.duration;
  n.revenue = spec.revenue;
  n.delay_penalty = spec.delay_penalty_per_day;
  for (const auto& [k, amount] : spec.commodity_demand)
    if (amount != 0.0) n.demand[k] = -amount;
  n.tool = spec.required_tool;
  return n;
}

std::vector<ServiceNeed> generate_deterministic_with_phase(const std::vector<CustomerSat>& sats,
                                                           const ServiceTypeSpec& spec, double horizon,
                                                           double phase) {
  std::vector<ServiceNeed> out;
  for (std::size_t s = 0; s < sats.size(); ++s)
    for (double t = phase; t < horizon; t += spec.occurrence_days)
      out.push_back(make_need(0, sats[s], static_cast<int>(s), spec, t));
  return out;
}

std::vector<ServiceNeed> generate_deterministic(const std::vector<CustomerSat>& sats, const ServiceTypeSpec& spec,
                                                double horizon, std::uint64_t seed) {
  if (spec.occurrence != OccurrenceKind::deterministic)
    throw std::invalid_argument("service " + spec.id + " is not deterministic");
  std::vector<ServiceNeed> out;
  for (std::size_t s = 0; s < sats.size(); ++s) {
    std::mt19937_64 rng(stream_seed(seed, spec.id, static_cast<int>(s)));
    double phase = unit_uniform(rng()) * spec.occurrence_days;
    for (double t = phase; t < horizon; t += spec.occurrence_days)
      out.push_back(make_need(0, sats[s], static_cast<int>(s), spec, t));
  }
  return out;
}

std::vector<ServiceNeed> generate_random(const std::vector<CustomerSat>& sats, const ServiceTypeSpec& spec,
                                         double horizon, std::uint64_t seed) {
  if (spec.occurrence != OccurrenceKind::random) throw std::invalid_argument("service " + spec.id + " is not random");
  std::vector<ServiceNeed> out;
  for (std::size_t s = 0; s < sats.size(); ++s) {
    std::mt19937_64 rng(stream_seed(seed, spec.id, static_cast<int>(s)));
    double t = 0.0;
    for (;;) {
      t += -spec.occurrence_days * std::log1p(-unit_uniform(rng()));
      if (!(t < horizon)) break;
      out.push_back(make_need(0, sats[s], static_cast<int>(s), spec, t));
    }
  }
  return out;
}

DemandStream generate_demand(const std::vector<CustomerSat>& sats, const Scenario& scenario, double horizon,
                             std::uint64_t seed) {
  DemandStream ds;
  ds.seed = seed;
  for (const auto& spec : scenario.services) {
    auto part = spec.occurrence == OccurrenceKind::deterministic ? generate_deterministic(sats, spec, horizon, seed)
                                                                 : generate_random(sats, spec, horizon, seed);
    ds.needs.insert(ds.needs.end(), part.begin(), part.end());
  }
  std::stable_sort(ds.needs.begin(), ds.needs.end(), [](const ServiceNeed& a, const ServiceNeed& b) {
    if (a.occurrence != b.occurrence) return a.occurrence < b.occurrence;
    if (a.sat_index != b.sat_index) return a.sat_index < b.sat_index;
    return a.type < b.type;
  });
  for (std::size_t i = 0; i < ds.needs.size(); ++i) ds.needs[i].id = static_cast<int>(i);
  return ds;
}

std::vector<int> build_window(const ServiceNeed& need, const TimeGrid& grid) {
  std::vector<int> out;
  const double end = need.occurrence + need.window;
  for (int t = grid.index_at_or_after(need.occurrence); t < grid.size() && grid.day(t) < end; ++t) out.push_back(t);
  return out;
}

int earliest_start(const ServiceNeed& need, const TimeGrid& grid) { return grid.snap_up(need.occurrence); }

std::map<int, std::vector<int>> build_beta(const ServiceNeed& need, const TimeGrid& grid,
                                           const std::vector<int>& window) {
  std::map<int, std::vector<int>> beta;
  for (int tau : window) {
    auto& cover = beta[tau];
    const double end = grid.day(tau) + need.duration;
    for (int t = tau; t < grid.size() && grid.day(t) < end; ++t) cover.push_back(t);
  }
  return beta;
}

std::vector<bool> tool_flags(const ServiceTypeSpec& spec, const std::vector<std::string>& tool_ids) {
  std::vector<bool> flags(tool_ids.size(), false);
  bool found = false;
  for (std::size_t k = 0; k < tool_ids.size(); ++k)
    if (tool_ids[k] == spec.required_tool) flags[k] = found = true;
  if (!found) throw std::invalid_argument("service " + spec.id + " requires unknown tool " + spec.required_tool);
  return flags;
}

std::set<int> window_union(const std::vector<std::vector<int>>& windows) {
  std::set<int> out;
  for (const auto& w : windows) out.insert(w.begin(), w.end());
  return out;
}

std::string export_demand_csv(const DemandStream& stream) {
  std::ostringstream os;
  os << "need_id,satellite,type,tau_day\n";
  for (const auto& n : stream.needs)
    os << n.id << ',' << csv_field(n.satellite) << ',' << csv_field(n.type) << ',' << format_double(n.occurrence)
       << '\n';
  return os.str();
}

DemandStream import_demand_csv(const std::string& text, const std::vector<CustomerSat>& sats,
                               const Scenario& scenario) {
  DemandStream ds;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "need_id,satellite,type,tau_day")
        throw ParseError("demand:1: expected header need_id,satellite,type,tau_day", 1);
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 4) throw ParseError("demand:" + std::to_string(lineno) + ": expected 4 fields", lineno);
    auto sat = std::find_if(sats.begin(), sats.end(), [&](const CustomerSat& s) { return s.name == fields[1]; });
    if (sat == sats.end())
      throw ParseError("demand:" + std::to_string(lineno) + ": unknown satellite " + fields[1], lineno);
    try {
      const auto& spec = scenario.service(fields[2]);
      ds.needs.push_back(make_need(std::stoi(fields[0]), *sat, static_cast<int>(sat - sats.begin()), spec,
                                   std::stod(fields[3])));
    } catch (const ValidationError& e) {
      throw ParseError("demand:" + std::to_string(lineno) + ": " + e.what(), lineno);
    } catch (const std::exception&) {
      throw ParseError("demand:" + std::to_string(lineno) + ": malformed number", lineno);
    }
  }
  return ds;
}

}  // namespace oos
