#pragma once

// JSON serialization of instances. Writing is canonical (fixed key order,
// shortest round-trip numbers), so parse -> write is byte-stable.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ucpd/model.hpp"

namespace ucpd {

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline std::string line_of_offset(const std::string& text, size_t byte) {
  size_t line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return std::to_string(line);
}

inline const ordered_json& field(const ordered_json& j, const char* key,
                                 const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(where + ": missing field \"" + key + "\"");
  return *it;
}

inline double num_field(const ordered_json& j, const char* key,
                        const std::string& where) {
  const ordered_json& v = field(j, key, where);
  if (!v.is_number())
    throw InputError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int int_field(const ordered_json& j, const char* key,
                     const std::string& where) {
  const ordered_json& v = field(j, key, where);
  if (!v.is_number_integer())
    throw InputError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

inline std::vector<double> demand_field(const ordered_json& j, const char* key,
                                        int horizon) {
  const ordered_json& v = field(j, key, "instance");
  if (!v.is_array() || static_cast<int>(v.size()) != horizon)
    throw InputError(std::string(key) + ": expected an array of length " +
                     std::to_string(horizon));
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t t = 0; t < v.size(); ++t) {
    if (!v[t].is_number())
      throw InputError(std::string(key) + "[" + std::to_string(t) +
                       "]: expected a number");
    double d = v[t].get<double>();
    if (d < 0.0)
      throw InputError(std::string(key) + "[" + std::to_string(t) +
                       "]: demand must be >= 0");
    out.push_back(d);
  }
  return out;
}

inline Unit unit_from_json(const ordered_json& j, const std::string& where) {
  Unit u;
  const ordered_json& id = field(j, "id", where);
  if (!id.is_string() || id.get<std::string>().empty())
    throw InputError(where + ".id: expected a non-empty string");
  u.id = id.get<std::string>();

  const ordered_json& pts = field(j, "points", where);
  if (!pts.is_array() || pts.empty())
    throw InputError(where + ".points: expected a non-empty array");
  double prev_power = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    std::string pw = where + ".points[" + std::to_string(i) + "]";
    OperatingPoint p;
    p.power = num_field(pts[i], "power", pw);
    p.r1 = num_field(pts[i], "r1", pw);
    p.r2 = num_field(pts[i], "r2", pw);
    p.dwell_up = int_field(pts[i], "dwell_up", pw);
    p.dwell_down = int_field(pts[i], "dwell_down", pw);
    if (p.power <= prev_power)
      throw InputError(pw + ".power: operating point powers must be positive "
                       "and strictly increasing");
    if (p.r1 < 0 || p.r2 < 0) throw InputError(pw + ": reserves must be >= 0");
    if (p.dwell_up < 1 || p.dwell_down < 1)
      throw InputError(pw + ": dwell times must be >= 1");
    prev_power = p.power;
    u.points.push_back(p);
  }

  u.min_up = int_field(j, "min_up", where);
  u.min_down = int_field(j, "min_down", where);
  if (u.min_up < 1 || u.min_down < 1)
    throw InputError(where + ": min_up and min_down must be >= 1");
  u.cost_startup = num_field(j, "cost_startup", where);
  u.cost_fixed = num_field(j, "cost_fixed", where);
  u.cost_prop = num_field(j, "cost_prop", where);
  if (u.cost_startup < 0 || u.cost_fixed < 0 || u.cost_prop < 0)
    throw InputError(where + ": costs must be >= 0");

  const ordered_json& init = field(j, "init", where);
  std::string wi = where + ".init";
  u.init.point = int_field(init, "point", wi);
  u.init.dwell = int_field(init, "dwell", wi);
  u.init.since_startup = int_field(init, "since_startup", wi);
  u.init.offline_elapsed = int_field(init, "offline_elapsed", wi);
  if (u.init.point < 0 || u.init.point > u.num_points())
    throw InputError(wi + ".point: out of range");
  if (u.init.dwell < 1) throw InputError(wi + ".dwell: must be >= 1");
  if (u.init.point >= 1) {
    if (u.init.since_startup < u.init.dwell)
      throw InputError(wi + ": since_startup must be >= dwell for an online "
                       "unit");
  } else if (u.init.offline_elapsed < 1) {
    throw InputError(wi + ".offline_elapsed: must be >= 1");
  }
  return u;
}

inline ordered_json unit_to_json(const Unit& u) {
  ordered_json j;
  j["id"] = u.id;
  ordered_json pts = ordered_json::array();
  for (const OperatingPoint& p : u.points) {
    ordered_json pj;
    pj["power"] = p.power;
    pj["r1"] = p.r1;
    pj["r2"] = p.r2;
    pj["dwell_up"] = p.dwell_up;
    pj["dwell_down"] = p.dwell_down;
    pts.push_back(pj);
  }
  j["points"] = pts;
  j["min_up"] = u.min_up;
  j["min_down"] = u.min_down;
  j["cost_startup"] = u.cost_startup;
  j["cost_fixed"] = u.cost_fixed;
  j["cost_prop"] = u.cost_prop;
  ordered_json init;
  init["point"] = u.init.point;
  init["dwell"] = u.init.dwell;
  init["since_startup"] = u.init.since_startup;
  init["offline_elapsed"] = u.init.offline_elapsed;
  j["init"] = init;
  return j;
}

}  // namespace detail

inline Instance parse_instance(const std::string& text,
                               const std::string& source = "<string>") {
  detail::ordered_json j;
  try {
    j = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ":" + detail::line_of_offset(text, e.byte) +
                     ": " + e.what());
  }
  if (!j.is_object()) throw InputError(source + ": expected a JSON object");

  Instance inst;
  inst.horizon = detail::int_field(j, "horizon", "instance");
  if (inst.horizon < 1) throw InputError("horizon: must be >= 1");

  const detail::ordered_json& units = detail::field(j, "units", "instance");
  if (!units.is_array() || units.empty())
    throw InputError("units: expected a non-empty array");
  std::set<std::string> seen;
  for (size_t k = 0; k < units.size(); ++k) {
    Unit u =
        detail::unit_from_json(units[k], "units[" + std::to_string(k) + "]");
    if (!seen.insert(u.id).second)
      throw InputError("units[" + std::to_string(k) + "]: duplicate id \"" +
                       u.id + "\"");
    inst.units.push_back(std::move(u));
  }
  inst.demand_power = detail::demand_field(j, "demand_power", inst.horizon);
  inst.demand_r1 = detail::demand_field(j, "demand_r1", inst.horizon);
  inst.demand_r2 = detail::demand_field(j, "demand_r2", inst.horizon);
  return inst;
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path);
}

inline std::string instance_to_json(const Instance& inst) {
  detail::ordered_json j;
  j["horizon"] = inst.horizon;
  detail::ordered_json units = detail::ordered_json::array();
  for (const Unit& u : inst.units) units.push_back(detail::unit_to_json(u));
  j["units"] = units;
  j["demand_power"] = inst.demand_power;
  j["demand_r1"] = inst.demand_r1;
  j["demand_r2"] = inst.demand_r2;
  return j.dump(2) + "\n";
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write instance file: " + path);
  out << instance_to_json(inst);
}

}  // namespace ucpd
