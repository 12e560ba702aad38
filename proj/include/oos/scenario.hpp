#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oos {

/// Raised when a config or catalog file cannot be parsed.  `line()` is 1-based
/// and zero when the failure is not tied to a location in the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a structurally valid scenario violates an invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CommodityKind { continuous, integer, tool };
enum class VehicleClass { launcher, depot, servicer };
enum class PropulsionKind { high_thrust, low_thrust };
enum class OccurrenceKind { deterministic, random };

struct CommoditySpec {
  std::string id;
  CommodityKind kind = CommodityKind::continuous;
  double unit_mass = 1.0;      // kg per unit (1 for continuous commodities)
  double purchase_cost = 0.0;  // $ per unit
  bool propellant = false;

  bool is_integral() const { return kind != CommodityKind::continuous; }
  bool operator==(const CommoditySpec&) const = default;
};

struct PropulsionMode {
  PropulsionKind kind = PropulsionKind::high_thrust;
  double isp = 0.0;     // s
  double thrust = 0.0;  // N, unused by the impulsive model
  std::string propellant;
  std::vector<int> flight_durations;  // days
  std::vector<std::string> trajectory_options{"phasing"};

  bool operator==(const PropulsionMode&) const = default;
};

struct StationKeeping {
  std::string commodity;
  double rate_per_day = 0.0;  // kg/day

  bool operator==(const StationKeeping&) const = default;
};

struct VehicleDesign {
  std::string id;
  VehicleClass cls = VehicleClass::servicer;
  double dry_mass = 0.0;
  // Per-commodity limits: kg for continuous commodities, units otherwise.
  std::map<std::string, double> capacities;
  // Optional limit on the summed payload mass, kg.
  std::optional<double> payload_limit;
  std::set<std::string> tools_installed;
  double operating_cost_per_day = 0.0;
  double manufacturing_cost = 0.0;
  std::vector<PropulsionMode> propulsion;
  std::optional<StationKeeping> station_keeping;

  /// True if the design may carry commodity `k` at all.
  bool can_carry(const std::string& k) const {
    return capacities.contains(k) || payload_limit.has_value();
  }
  bool operator==(const VehicleDesign&) const = default;
};

struct ServiceTypeSpec {
  std::string id;
  double revenue = 0.0;
  double delay_penalty_per_day = 0.0;
  double duration = 0.0;  // days
  double window = 0.0;    // days
  OccurrenceKind occurrence = OccurrenceKind::deterministic;
  double occurrence_days = 0.0;  // frequency, or mean inter-occurrence time
  std::map<std::string, double> commodity_demand;  // magnitudes, >= 0
  std::string required_tool;

  bool operator==(const ServiceTypeSpec&) const = default;
};

struct EconomicParams {
  double launch_cost_per_kg = 11300.0;
  int launcher_cadence = 30;       // days
  int launch_duration = 2;         // days, Earth -> parking node
  double g0 = 9.80665;             // m/s^2
  double mu_earth = 3.986004418e14;  // m^3/s^2
  double forbidden_radius = 6578.0;  // km
  double geo_radius = 42164.0;       // km

  bool operator==(const EconomicParams&) const = default;
};

struct ParkingSlot {
  std::string name;
  double longitude = 0.0;  // deg east

  bool operator==(const ParkingSlot&) const = default;
};

/// One physical vehicle of the fleet.  `location` is a parking slot name, a
/// customer satellite name, or "earth" for vehicles that must be launched.
struct FleetMember {
  std::string id;
  std::string design;
  std::string location;
  std::map<std::string, double> initial_load;

  bool pre_deployed() const { return location != "earth"; }
  bool operator==(const FleetMember&) const = default;
};

struct GridParams {
  int period = 10;
  std::vector<int> offsets{2, 4};

  bool operator==(const GridParams&) const = default;
};

struct SolverParams {
  double mip_gap = 0.01;
  double time_limit = 600.0;  // s
  int breakpoints = 20;

  bool operator==(const SolverParams&) const = default;
};

struct CustomerSat {
  std::string name;
  double longitude = 0.0;  // deg east, (-180, 180]

  bool operator==(const CustomerSat&) const = default;
};

/// Immutable run parameterization.  Built by `load_scenario` or
/// `parse_scenario`; never mutated after validation.
struct Scenario {
  std::string name;
  std::vector<CommoditySpec> commodities;
  std::vector<VehicleDesign> designs;
  std::vector<ServiceTypeSpec> services;
  EconomicParams economics;
  std::vector<ParkingSlot> parking;
  std::vector<FleetMember> fleet;
  GridParams grid;
  SolverParams solver;
  // Finite per-step Earth supply per commodity; absent means unlimited.
  std::map<std::string, double> earth_supply;

  const CommoditySpec& commodity(const std::string& id) const;
  const VehicleDesign& design(const std::string& id) const;
  const ServiceTypeSpec& service(const std::string& id) const;
  std::optional<std::size_t> commodity_index(const std::string& id) const;
  std::vector<std::string> tool_ids() const;
  std::vector<std::string> propellant_ids() const;

  /// Manufacturing cost of every vehicle that starts the run in orbit.
  double initial_investment() const;

  bool operator==(const Scenario&) const = default;
};

/// Loads and validates a scenario file.  A top-level "extends" entry names a
/// base file (relative to the including file) that is deep-merged underneath.
Scenario load_scenario(const std::filesystem::path& path);

/// Parses scenario JSON text (no "extends" resolution).
Scenario parse_scenario(const std::string& text);

/// Flat JSON text that `parse_scenario` maps back to an identical Scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Checks every invariant; throws ValidationError naming the first violation.
void validate(const Scenario& scenario);

/// Reads a `name,longitude_deg` catalog and normalizes longitudes to (-180, 180].
std::vector<CustomerSat> load_catalog(const std::filesystem::path& path);
std::vector<CustomerSat> parse_catalog(const std::string& text);

double normalize_longitude(double deg);

std::string to_string(CommodityKind k);
std::string to_string(VehicleClass c);
std::string to_string(PropulsionKind k);

}  // namespace oos
