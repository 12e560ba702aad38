#include "oos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oos/text.hpp"

namespace oos {

using nlohmann::json;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(origin + ":" + std::to_string(line) + ": " + e.what(), line);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Objects merge key by key; every other value in `over` replaces `base`.
void deep_merge(json& base, const json& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

json load_with_extends(const std::filesystem::path& path, int depth) {
  if (depth > 16) throw ParseError("extends chain too deep at " + path.string(), 0);
  json doc = parse_json_text(read_file(path), path.string());
  if (!doc.is_object()) throw ParseError(path.string() + ": top level must be an object", 1);
  if (!doc.contains("extends")) return doc;
  if (!doc["extends"].is_string())
    throw ParseError(path.string() + ": \"extends\" must be a file name", 0);
  auto base_path = path.parent_path() / doc["extends"].get<std::string>();
  json base = load_with_extends(base_path, depth + 1);
  doc.erase("extends");
  deep_merge(base, doc);
  return base;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object", 0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError(where + ": unknown key \"" + it.key() + "\"", 0);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what(), 0);
  }
}

template <class T>
T get_req(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"", 0);
  return get_or<T>(j, key, T{}, where);
}

CommodityKind commodity_kind_from(const std::string& s, const std::string& where) {
  if (s == "continuous") return CommodityKind::continuous;
  if (s == "integer") return CommodityKind::integer;
  if (s == "tool") return CommodityKind::tool;
  throw ParseError(where + ": unknown commodity kind \"" + s + "\"", 0);
}

VehicleClass vehicle_class_from(const std::string& s, const std::string& where) {
  if (s == "launcher") return VehicleClass::launcher;
  if (s == "depot") return VehicleClass::depot;
  if (s == "servicer") return VehicleClass::servicer;
  throw ParseError(where + ": unknown vehicle class \"" + s + "\"", 0);
}

PropulsionKind propulsion_kind_from(const std::string& s, const std::string& where) {
  if (s == "high_thrust") return PropulsionKind::high_thrust;
  if (s == "low_thrust") return PropulsionKind::low_thrust;
  throw ParseError(where + ": unknown propulsion kind \"" + s + "\"", 0);
}

Scenario from_json(const json& root) {
  check_keys(root,
             {"name", "commodities", "designs", "services", "economics", "parking", "fleet", "grid",
              "solver", "earth_supply"},
             "scenario");
  Scenario sc;
  sc.name = get_or<std::string>(root, "name", "", "scenario");

  for (const auto& c : root.value("commodities", json::array())) {
    const std::string where = "commodity";
    check_keys(c, {"id", "kind", "unit_mass", "purchase_cost", "propellant"}, where);
    CommoditySpec k;
    k.id = get_req<std::string>(c, "id", where);
    k.kind = commodity_kind_from(get_or<std::string>(c, "kind", "continuous", where), where + " " + k.id);
    k.unit_mass = get_or<double>(c, "unit_mass", 1.0, where);
    k.purchase_cost = get_or<double>(c, "purchase_cost", 0.0, where);
    k.propellant = get_or<bool>(c, "propellant", false, where);
    sc.commodities.push_back(std::move(k));
  }

  for (const auto& d : root.value("designs", json::array())) {
    const std::string where = "design";
    check_keys(d,
               {"id", "class", "dry_mass", "capacities", "payload_limit", "tools", "operating_cost_per_day",
                "manufacturing_cost", "propulsion", "station_keeping"},
               where);
    VehicleDesign v;
    v.id = get_req<std::string>(d, "id", where);
    const std::string w = where + " " + v.id;
    v.cls = vehicle_class_from(get_req<std::string>(d, "class", w), w);
    v.dry_mass = get_or<double>(d, "dry_mass", 0.0, w);
    v.capacities = get_or<std::map<std::string, double>>(d, "capacities", {}, w);
    if (d.contains("payload_limit") && !d["payload_limit"].is_null())
      v.payload_limit = get_req<double>(d, "payload_limit", w);
    for (auto& t : get_or<std::vector<std::string>>(d, "tools", {}, w)) v.tools_installed.insert(t);
    v.operating_cost_per_day = get_or<double>(d, "operating_cost_per_day", 0.0, w);
    v.manufacturing_cost = get_or<double>(d, "manufacturing_cost", 0.0, w);
    for (const auto& p : d.value("propulsion", json::array())) {
      check_keys(p, {"kind", "isp", "thrust", "propellant", "flight_durations", "trajectory_options"},
                 w + " propulsion");
      PropulsionMode m;
      m.kind = propulsion_kind_from(get_req<std::string>(p, "kind", w), w);
      m.isp = get_or<double>(p, "isp", 0.0, w);
      m.thrust = get_or<double>(p, "thrust", 0.0, w);
      m.propellant = get_req<std::string>(p, "propellant", w);
      m.flight_durations = get_or<std::vector<int>>(p, "flight_durations", {}, w);
      m.trajectory_options =
          get_or<std::vector<std::string>>(p, "trajectory_options", {"phasing"}, w);
      v.propulsion.push_back(std::move(m));
    }
    if (d.contains("station_keeping") && !d["station_keeping"].is_null()) {
      const auto& s = d["station_keeping"];
      check_keys(s, {"commodity", "rate_per_day"}, w + " station_keeping");
      v.station_keeping = StationKeeping{get_req<std::string>(s, "commodity", w),
                                         get_or<double>(s, "rate_per_day", 0.0, w)};
    }
    sc.designs.push_back(std::move(v));
  }

  for (const auto& s : root.value("services", json::array())) {
    const std::string where = "service";
    check_keys(s,
               {"id", "revenue", "delay_penalty_per_day", "duration", "window", "occurrence", "demand",
                "tool"},
               where);
    ServiceTypeSpec t;
    t.id = get_req<std::string>(s, "id", where);
    const std::string w = where + " " + t.id;
    t.revenue = get_or<double>(s, "revenue", 0.0, w);
    t.delay_penalty_per_day = get_or<double>(s, "delay_penalty_per_day", 0.0, w);
    t.duration = get_or<double>(s, "duration", 0.0, w);
    t.window = get_or<double>(s, "window", 0.0, w);
    if (!s.contains("occurrence")) throw ParseError(w + ": missing \"occurrence\"", 0);
    const auto& o = s["occurrence"];
    check_keys(o, {"kind", "days"}, w + " occurrence");
    const auto kind = get_req<std::string>(o, "kind", w);
    if (kind == "deterministic")
      t.occurrence = OccurrenceKind::deterministic;
    else if (kind == "random")
      t.occurrence = OccurrenceKind::random;
    else
      throw ParseError(w + ": unknown occurrence kind \"" + kind + "\"", 0);
    t.occurrence_days = get_req<double>(o, "days", w);
    t.commodity_demand = get_or<std::map<std::string, double>>(s, "demand", {}, w);
    t.required_tool = get_or<std::string>(s, "tool", "", w);
    sc.services.push_back(std::move(t));
  }

  if (root.contains("economics")) {
    const auto& e = root["economics"];
    const std::string w = "economics";
    check_keys(e,
               {"launch_cost_per_kg", "launcher_cadence_days", "launch_duration_days", "g0", "mu_earth",
                "forbidden_radius_km", "geo_radius_km"},
               w);
    auto& ec = sc.economics;
    ec.launch_cost_per_kg = get_or<double>(e, "launch_cost_per_kg", ec.launch_cost_per_kg, w);
    ec.launcher_cadence = get_or<int>(e, "launcher_cadence_days", ec.launcher_cadence, w);
    ec.launch_duration = get_or<int>(e, "launch_duration_days", ec.launch_duration, w);
    ec.g0 = get_or<double>(e, "g0", ec.g0, w);
    ec.mu_earth = get_or<double>(e, "mu_earth", ec.mu_earth, w);
    ec.forbidden_radius = get_or<double>(e, "forbidden_radius_km", ec.forbidden_radius, w);
    ec.geo_radius = get_or<double>(e, "geo_radius_km", ec.geo_radius, w);
  }

  for (const auto& p : root.value("parking", json::array())) {
    check_keys(p, {"name", "longitude"}, "parking");
    sc.parking.push_back(
        {get_req<std::string>(p, "name", "parking"), get_req<double>(p, "longitude", "parking")});
  }

  for (const auto& f : root.value("fleet", json::array())) {
    const std::string w = "fleet";
    check_keys(f, {"id", "design", "location", "initial_load"}, w);
    FleetMember m;
    m.id = get_req<std::string>(f, "id", w);
    m.design = get_req<std::string>(f, "design", w + " " + m.id);
    m.location = get_req<std::string>(f, "location", w + " " + m.id);
    m.initial_load = get_or<std::map<std::string, double>>(f, "initial_load", {}, w + " " + m.id);
    sc.fleet.push_back(std::move(m));
  }

  if (root.contains("grid")) {
    const auto& g = root["grid"];
    check_keys(g, {"period_days", "offsets_days"}, "grid");
    sc.grid.period = get_or<int>(g, "period_days", sc.grid.period, "grid");
    sc.grid.offsets = get_or<std::vector<int>>(g, "offsets_days", sc.grid.offsets, "grid");
  }

  if (root.contains("solver")) {
    const auto& s = root["solver"];
    check_keys(s, {"mip_gap", "time_limit_s", "breakpoints"}, "solver");
    sc.solver.mip_gap = get_or<double>(s, "mip_gap", sc.solver.mip_gap, "solver");
    sc.solver.time_limit = get_or<double>(s, "time_limit_s", sc.solver.time_limit, "solver");
    sc.solver.breakpoints = get_or<int>(s, "breakpoints", sc.solver.breakpoints, "solver");
  }

  sc.earth_supply = get_or<std::map<std::string, double>>(root, "earth_supply", {}, "scenario");
  return sc;
}

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

}  // namespace

std::string to_string(CommodityKind k) {
  switch (k) {
    case CommodityKind::continuous: return "continuous";
    case CommodityKind::integer: return "integer";
    case CommodityKind::tool: return "tool";
  }
  return "?";
}

std::string to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::launcher: return "launcher";
    case VehicleClass::depot: return "depot";
    case VehicleClass::servicer: return "servicer";
  }
  return "?";
}

std::string to_string(PropulsionKind k) {
  return k == PropulsionKind::high_thrust ? "high_thrust" : "low_thrust";
}

const CommoditySpec& Scenario::commodity(const std::string& id) const {
  for (const auto& c : commodities)
    if (c.id == id) return c;
  throw ValidationError("unknown commodity \"" + id + "\"");
}

const VehicleDesign& Scenario::design(const std::string& id) const {
  for (const auto& d : designs)
    if (d.id == id) return d;
  throw ValidationError("unknown vehicle design \"" + id + "\"");
}

const ServiceTypeSpec& Scenario::service(const std::string& id) const {
  for (const auto& s : services)
    if (s.id == id) return s;
  throw ValidationError("unknown service type \"" + id + "\"");
}

std::optional<std::size_t> Scenario::commodity_index(const std::string& id) const {
  for (std::size_t i = 0; i < commodities.size(); ++i)
    if (commodities[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::string> Scenario::tool_ids() const {
  std::vector<std::string> out;
  for (const auto& c : commodities)
    if (c.kind == CommodityKind::tool) out.push_back(c.id);
  return out;
}

std::vector<std::string> Scenario::propellant_ids() const {
  std::vector<std::string> out;
  for (const auto& c : commodities)
    if (c.propellant) out.push_back(c.id);
  return out;
}

double Scenario::initial_investment() const {
  double total = 0.0;
  for (const auto& f : fleet)
    if (f.pre_deployed()) total += design(f.design).manufacturing_cost;
  return total;
}

double normalize_longitude(double deg) {
  double x = std::fmod(deg, 360.0);
  if (x <= -180.0) x += 360.0;
  if (x > 180.0) x -= 360.0;
  return x;
}

void validate(const Scenario& sc) {
  std::set<std::string> ids;
  for (const auto& c : sc.commodities) {
    if (c.id.empty()) fail("commodity id must be nonempty");
    if (!ids.insert(c.id).second) fail("duplicate commodity id \"" + c.id + "\"");
    if (!(c.unit_mass > 0)) fail("commodity " + c.id + ": unit_mass must be > 0");
    if (!(c.purchase_cost >= 0)) fail("commodity " + c.id + ": purchase_cost must be >= 0");
    if (c.kind == CommodityKind::continuous && c.unit_mass != 1.0)
      fail("commodity " + c.id + ": continuous commodities are counted in kg (unit_mass 1)");
    if (c.propellant && c.kind != CommodityKind::continuous)
      fail("commodity " + c.id + ": propellants must be continuous");
  }
  auto need_commodity = [&](const std::string& k, const std::string& who) {
    if (!sc.commodity_index(k)) fail(who + " references unknown commodity \"" + k + "\"");
  };
  auto need_tool = [&](const std::string& k, const std::string& who) {
    need_commodity(k, who);
    if (sc.commodity(k).kind != CommodityKind::tool)
      fail(who + ": \"" + k + "\" is not a tool commodity");
  };

  std::set<std::string> design_ids;
  for (const auto& d : sc.designs) {
    const std::string who = "design " + d.id;
    if (!design_ids.insert(d.id).second) fail("duplicate design id \"" + d.id + "\"");
    if (!(d.dry_mass >= 0)) fail(who + ": dry_mass must be >= 0");
    if (d.cls == VehicleClass::servicer && !(d.dry_mass > 0)) fail(who + ": servicer dry_mass must be > 0");
    for (const auto& [k, cap] : d.capacities) {
      need_commodity(k, who);
      if (!(cap >= 0)) fail(who + ": capacities must be >= 0");
    }
    if (d.payload_limit && !(*d.payload_limit >= 0)) fail(who + ": payload_limit must be >= 0");
    for (const auto& t : d.tools_installed) need_tool(t, who);
    if (!(d.operating_cost_per_day >= 0) || !(d.manufacturing_cost >= 0))
      fail(who + ": costs must be >= 0");
    if (d.cls == VehicleClass::depot && !d.propulsion.empty())
      fail(who + ": depots have no propulsion modes");
    if (d.cls == VehicleClass::launcher && !d.propulsion.empty())
      fail(who + ": launchers fly fixed launch arcs and take no propulsion modes");
    if (d.cls == VehicleClass::servicer) {
      if (d.propulsion.empty()) fail(who + ": a servicer needs at least one propulsion mode");
      if (d.propulsion.size() > 2) fail(who + ": at most two propulsion modes");
      if (d.propulsion.size() == 2 && d.propulsion[0].kind == d.propulsion[1].kind)
        fail(who + ": a multimodal servicer has one high-thrust and one low-thrust mode");
      if (d.payload_limit == std::nullopt && d.capacities.empty())
        fail(who + ": a servicer needs finite capacities");
    }
    for (const auto& m : d.propulsion) {
      if (!(m.isp > 0)) fail(who + ": isp must be > 0");
      if (m.kind == PropulsionKind::low_thrust && !(m.thrust > 0))
        fail(who + ": low-thrust modes need thrust > 0");
      need_commodity(m.propellant, who);
      if (!sc.commodity(m.propellant).propellant)
        fail(who + ": \"" + m.propellant + "\" is not flagged as a propellant");
      if (!d.can_carry(m.propellant)) fail(who + ": no capacity for its own propellant");
      if (m.flight_durations.empty()) fail(who + ": flight_durations must be nonempty");
      for (int q : m.flight_durations)
        if (q <= 0) fail(who + ": flight durations must be > 0");
      if (m.trajectory_options.empty()) fail(who + ": trajectory_options must be nonempty");
    }
    if (d.station_keeping) {
      need_commodity(d.station_keeping->commodity, who);
      if (!(d.station_keeping->rate_per_day >= 0)) fail(who + ": station-keeping rate must be >= 0");
      if (!d.can_carry(d.station_keeping->commodity))
        fail(who + ": no capacity for its station-keeping commodity");
    }
  }

  std::set<std::string> service_ids;
  for (const auto& s : sc.services) {
    const std::string who = "service " + s.id;
    if (!service_ids.insert(s.id).second) fail("duplicate service id \"" + s.id + "\"");
    if (!(s.revenue >= 0)) fail(who + ": revenue must be >= 0");
    if (!(s.delay_penalty_per_day >= 0)) fail(who + ": delay penalty must be >= 0");
    if (!(s.duration > 0)) fail(who + ": duration must be > 0");
    if (!(s.window > 0)) fail(who + ": window must be > 0");
    if (!(s.occurrence_days > 0)) fail(who + ": occurrence days must be > 0");
    for (const auto& [k, amount] : s.commodity_demand) {
      need_commodity(k, who);
      if (!(amount >= 0)) fail(who + ": demand magnitudes must be >= 0");
    }
    if (s.required_tool.empty()) fail(who + ": a required tool must be given");
    need_tool(s.required_tool, who);
  }

  const auto& e = sc.economics;
  if (!(e.launch_cost_per_kg > 0) || e.launcher_cadence <= 0 || e.launch_duration <= 0 || !(e.g0 > 0) ||
      !(e.mu_earth > 0) || !(e.forbidden_radius > 0) || !(e.geo_radius > 0))
    fail("economics: all parameters must be strictly positive");
  if (!(e.forbidden_radius < e.geo_radius)) fail("economics: forbidden_radius must be < geo_radius");

  std::set<std::string> slots;
  for (const auto& p : sc.parking) {
    if (!slots.insert(p.name).second) fail("duplicate parking slot \"" + p.name + "\"");
    if (!std::isfinite(p.longitude)) fail("parking " + p.name + ": longitude must be finite");
    if (p.name == "earth") fail("\"earth\" is reserved for the Earth node");
  }

  std::set<std::string> members;
  for (const auto& f : sc.fleet) {
    const std::string who = "fleet member " + f.id;
    if (!members.insert(f.id).second) fail("duplicate fleet id \"" + f.id + "\"");
    if (!design_ids.contains(f.design)) fail(who + " references unknown design \"" + f.design + "\"");
    const auto& d = sc.design(f.design);
    if (d.cls == VehicleClass::launcher) fail(who + ": launchers are not fleet members");
    if (d.cls == VehicleClass::depot && !slots.contains(f.location))
      fail(who + ": depots are staged at parking slots");
    double mass = 0.0;
    for (const auto& [k, amount] : f.initial_load) {
      need_commodity(k, who);
      if (!(amount >= 0)) fail(who + ": initial load must be >= 0");
      if (!d.can_carry(k)) fail(who + ": design cannot carry \"" + k + "\"");
      auto cap = d.capacities.find(k);
      if (cap != d.capacities.end() && amount > cap->second + 1e-9)
        fail(who + ": initial load of " + k + " exceeds capacity");
      if (sc.commodity(k).is_integral() && amount != std::floor(amount))
        fail(who + ": integer commodity " + k + " needs a whole initial load");
      mass += amount * sc.commodity(k).unit_mass;
    }
    if (d.payload_limit && mass > *d.payload_limit + 1e-9) fail(who + ": initial load exceeds payload limit");
  }

  if (sc.grid.period <= 0) fail("grid: period must be > 0");
  for (std::size_t i = 0; i < sc.grid.offsets.size(); ++i) {
    int o = sc.grid.offsets[i];
    if (o <= 0 || o >= sc.grid.period) fail("grid: offsets must lie inside (0, period)");
    if (i > 0 && o <= sc.grid.offsets[i - 1]) fail("grid: offsets must be strictly increasing");
  }

  if (!(sc.solver.mip_gap >= 0)) fail("solver: mip_gap must be >= 0");
  if (!(sc.solver.time_limit > 0)) fail("solver: time limit must be > 0");
  if (sc.solver.breakpoints < 2) fail("solver: at least two breakpoints");

  for (const auto& [k, amount] : sc.earth_supply) {
    need_commodity(k, "earth_supply");
    if (!(amount >= 0)) fail("earth_supply: amounts must be >= 0");
  }
}

Scenario parse_scenario(const std::string& text) {
  json root = parse_json_text(text, "scenario");
  if (root.contains("extends")) throw ParseError("\"extends\" needs a file location; use load_scenario", 0);
  Scenario sc = from_json(root);
  validate(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ParseError("no such scenario file: " + path.string(), 0);
  Scenario sc = from_json(load_with_extends(path, 0));
  validate(sc);
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  json root;
  root["name"] = sc.name;
  root["commodities"] = json::array();
  for (const auto& c : sc.commodities)
    root["commodities"].push_back({{"id", c.id},
                                   {"kind", to_string(c.kind)},
                                   {"unit_mass", c.unit_mass},
                                   {"purchase_cost", c.purchase_cost},
                                   {"propellant", c.propellant}});
  root["designs"] = json::array();
  for (const auto& d : sc.designs) {
    json jd = {{"id", d.id},
               {"class", to_string(d.cls)},
               {"dry_mass", d.dry_mass},
               {"capacities", d.capacities},
               {"tools", std::vector<std::string>(d.tools_installed.begin(), d.tools_installed.end())},
               {"operating_cost_per_day", d.operating_cost_per_day},
               {"manufacturing_cost", d.manufacturing_cost},
               {"propulsion", json::array()}};
    if (d.payload_limit) jd["payload_limit"] = *d.payload_limit;
    for (const auto& m : d.propulsion)
      jd["propulsion"].push_back({{"kind", to_string(m.kind)},
                                  {"isp", m.isp},
                                  {"thrust", m.thrust},
                                  {"propellant", m.propellant},
                                  {"flight_durations", m.flight_durations},
                                  {"trajectory_options", m.trajectory_options}});
    if (d.station_keeping)
      jd["station_keeping"] = {{"commodity", d.station_keeping->commodity},
                               {"rate_per_day", d.station_keeping->rate_per_day}};
    root["designs"].push_back(std::move(jd));
  }
  root["services"] = json::array();
  for (const auto& s : sc.services)
    root["services"].push_back(
        {{"id", s.id},
         {"revenue", s.revenue},
         {"delay_penalty_per_day", s.delay_penalty_per_day},
         {"duration", s.duration},
         {"window", s.window},
         {"occurrence",
          {{"kind", s.occurrence == OccurrenceKind::deterministic ? "deterministic" : "random"},
           {"days", s.occurrence_days}}},
         {"demand", s.commodity_demand},
         {"tool", s.required_tool}});
  const auto& e = sc.economics;
  root["economics"] = {{"launch_cost_per_kg", e.launch_cost_per_kg},
                       {"launcher_cadence_days", e.launcher_cadence},
                       {"launch_duration_days", e.launch_duration},
                       {"g0", e.g0},
                       {"mu_earth", e.mu_earth},
                       {"forbidden_radius_km", e.forbidden_radius},
                       {"geo_radius_km", e.geo_radius}};
  root["parking"] = json::array();
  for (const auto& p : sc.parking) root["parking"].push_back({{"name", p.name}, {"longitude", p.longitude}});
  root["fleet"] = json::array();
  for (const auto& f : sc.fleet)
    root["fleet"].push_back(
        {{"id", f.id}, {"design", f.design}, {"location", f.location}, {"initial_load", f.initial_load}});
  root["grid"] = {{"period_days", sc.grid.period}, {"offsets_days", sc.grid.offsets}};
  root["solver"] = {{"mip_gap", sc.solver.mip_gap},
                    {"time_limit_s", sc.solver.time_limit},
                    {"breakpoints", sc.solver.breakpoints}};
  root["earth_supply"] = sc.earth_supply;
  return root.dump(2) + "\n";
}

std::vector<CustomerSat> parse_catalog(const std::string& text) {
  std::vector<CustomerSat> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "name,longitude_deg")
        throw ParseError("catalog:" + std::to_string(lineno) + ": expected header name,longitude_deg", lineno);
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(line);
    } catch (const std::exception&) {
    }
    if (fields.size() != 2 || fields[0].empty())
      throw ParseError("catalog:" + std::to_string(lineno) + ": malformed row", lineno);
    const std::string& name = fields[0];
    const std::string& lon_text = fields[1];
    double lon = 0.0;
    try {
      std::size_t used = 0;
      lon = std::stod(lon_text, &used);
      if (used != lon_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ParseError("catalog:" + std::to_string(lineno) + ": bad longitude \"" + lon_text + "\"", lineno);
    }
    if (!std::isfinite(lon) || lon < -360.0 || lon > 360.0)
      throw ParseError("catalog:" + std::to_string(lineno) + ": longitude outside [-360, 360]", lineno);
    out.push_back({std::move(name), normalize_longitude(lon)});
  }
  if (!header_seen) throw ParseError("catalog: missing header name,longitude_deg", 0);
  return out;
}

std::vector<CustomerSat> load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_file(path));
}

}  // namespace oos
