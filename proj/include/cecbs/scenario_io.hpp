#pragma once

// JSON scenario and solution files, and SVG rendering.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cecbs/errors.hpp"
#include "cecbs/scenario.hpp"
#include "cecbs/search.hpp"

namespace cecbs {

using Json = nlohmann::json;

namespace io_detail {

inline const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw InvalidScenario(path.empty() ? key : path + "." + key, "missing");
  return obj.at(key);
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw InvalidScenario(path, "expected a number");
  return v.get<double>();
}

inline int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InvalidScenario(path, "expected an integer");
  return v.get<int>();
}

inline Point point(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw InvalidScenario(path, "expected [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

inline Json point_json(Point p) { return Json::array({p.x, p.y}); }

inline Json polyline_json(const Polyline& pl) {
  Json a = Json::array();
  for (const Point& p : pl) a.push_back(point_json(p));
  return a;
}

inline Polyline polyline(const Json& v, const std::string& path) {
  if (!v.is_array()) throw InvalidScenario(path, "expected an array of points");
  Polyline out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(point(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace io_detail

// Applies the recognised keys of a "params" object.
inline void apply_params(const Json& j, SearchParams& sp, const std::string& path = "params") {
  using io_detail::integer;
  using io_detail::number;
  if (!j.is_object()) throw InvalidScenario(path, "expected an object");
  PlannerParams& p = sp.planner;
  for (const auto& [key, v] : j.items()) {
    const std::string f = path + "." + key;
    if (key == "eta_max") p.eta_max = integer(v, f);
    else if (key == "eta_min") p.eta_min = integer(v, f);
    else if (key == "alpha") p.alpha_deg = number(v, f);
    else if (key == "step_size") p.step_size = number(v, f);
    else if (key == "goal_bias") p.goal_bias = number(v, f);
    else if (key == "rewire_radius_factor") p.rewire_radius_factor = number(v, f);
    else if (key == "goal_tolerance") p.goal_tolerance = number(v, f);
    else if (key == "smoothing_s") p.s_initial = number(v, f);
    else if (key == "s_growth") p.s_growth = number(v, f);
    else if (key == "smoothing_escalations") p.smoothing_escalations = integer(v, f);
    else if (key == "resample_spacing") p.resample_spacing = number(v, f);
    else if (key == "budget_decay") p.budget_decay = number(v, f);
    else if (key == "max_attempts") p.max_attempts = integer(v, f);
    else if (key == "degree") p.degree = integer(v, f);
    else if (key == "max_ct_nodes") sp.max_ct_nodes = integer(v, f);
    else throw InvalidScenario(f, "unknown parameter");
  }
}

inline Json params_json(const SearchParams& sp) {
  const PlannerParams& p = sp.planner;
  return Json{{"eta_max", p.eta_max},
              {"eta_min", p.eta_min},
              {"alpha", p.alpha_deg},
              {"step_size", p.step_size},
              {"goal_bias", p.goal_bias},
              {"rewire_radius_factor", p.rewire_radius_factor},
              {"goal_tolerance", p.goal_tolerance},
              {"smoothing_s", p.s_initial},
              {"s_growth", p.s_growth},
              {"smoothing_escalations", p.smoothing_escalations},
              {"resample_spacing", p.resample_spacing},
              {"budget_decay", p.budget_decay},
              {"max_attempts", p.max_attempts},
              {"degree", p.degree},
              {"max_ct_nodes", sp.max_ct_nodes}};
}

inline Scenario scenario_from_json(const Json& j) {
  using namespace io_detail;
  Scenario sc;
  if (!j.is_object()) throw InvalidScenario("", "scenario must be a JSON object");
  if (j.contains("description")) {
    if (!j["description"].is_string()) throw InvalidScenario("description", "expected a string");
    sc.description = j["description"].get<std::string>();
  }
  const Json& world = require(j, "world", "");
  sc.width = number(require(world, "width", "world"), "world.width");
  sc.height = number(require(world, "height", "world"), "world.height");
  if (j.contains("obstacles")) {
    const Json& obs = j["obstacles"];
    if (!obs.is_array()) throw InvalidScenario("obstacles", "expected an array");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const std::string f = "obstacles[" + std::to_string(k) + "]";
      sc.obstacles.push_back(Rect{number(require(obs[k], "x", f), f + ".x"), number(require(obs[k], "y", f), f + ".y"),
                                  number(require(obs[k], "w", f), f + ".w"), number(require(obs[k], "h", f), f + ".h")});
    }
  }
  const Json& agents = require(j, "agents", "");
  if (!agents.is_array()) throw InvalidScenario("agents", "expected an array");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string f = "agents[" + std::to_string(k) + "]";
    const Json& a = agents[k];
    AgentSpec spec;
    spec.id = a.contains("id") ? integer(a["id"], f + ".id") : static_cast<int>(k);
    spec.start = point(require(a, "start", f), f + ".start");
    spec.goal = point(require(a, "goal", f), f + ".goal");
    if (a.contains("radius")) spec.radius = number(a["radius"], f + ".radius");
    if (a.contains("speed")) spec.speed = number(a["speed"], f + ".speed");
    sc.agents.push_back(spec);
  }
  if (j.contains("params")) apply_params(j["params"], sc.params);
  validate_scenario(sc);
  return sc;
}

inline Json scenario_to_json(const Scenario& sc) {
  Json j;
  if (!sc.description.empty()) j["description"] = sc.description;
  j["world"] = {{"width", sc.width}, {"height", sc.height}};
  j["obstacles"] = Json::array();
  for (const Rect& r : sc.obstacles) j["obstacles"].push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}});
  j["agents"] = Json::array();
  for (const AgentSpec& a : sc.agents) {
    j["agents"].push_back({{"id", a.id},
                           {"start", io_detail::point_json(a.start)},
                           {"goal", io_detail::point_json(a.goal)},
                           {"radius", a.radius},
                           {"speed", a.speed}});
  }
  j["params"] = params_json(sc.params);
  return j;
}

inline std::string read_text(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidScenario(file, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file);
  out << text;
  if (!out) throw Error("cannot write " + file);
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidScenario(origin, std::string("JSON parse error: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string& file) { return scenario_from_json(parse_json(read_text(file), file)); }

inline void save_scenario(const Scenario& sc, const std::string& file) { write_text(file, scenario_to_json(sc).dump(2) + "\n"); }

struct AgentRecord {
  AgentId id = 0;
  double cost = 0.0;
  Polyline path;
  std::vector<double> times;
  Polyline raw_path;

  friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

struct SolutionRecord {
  std::string status;
  std::uint64_t seed = 0;
  double soc = 0.0;
  int ct_iterations = 0;
  double wall_time = 0.0;
  Json params;
  std::vector<AgentRecord> agents;

  friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

inline SolutionRecord make_record(const Scenario& sc, const Solution& sol) {
  SolutionRecord rec;
  rec.status = to_string(sol.status);
  rec.seed = sol.seed;
  rec.soc = sol.soc;
  rec.ct_iterations = sol.iterations;
  rec.wall_time = sol.wall_time;
  rec.params = params_json(sc.params);
  for (const auto& [id, r] : sol.paths) {
    AgentRecord a{id, r.cost, r.smooth_path, {}, r.raw_path};
    const double v = sc.agent(id).speed;
    double s = 0.0;
    for (std::size_t k = 0; k < r.smooth_path.size(); ++k) {
      if (k > 0) s += distance(r.smooth_path[k - 1], r.smooth_path[k]);
      a.times.push_back(s / v);
    }
    rec.agents.push_back(std::move(a));
  }
  return rec;
}

inline Json record_to_json(const SolutionRecord& rec) {
  Json j{{"status", rec.status},
         {"seed", rec.seed},
         {"soc", rec.soc},
         {"ct_iterations", rec.ct_iterations},
         {"wall_time", rec.wall_time},
         {"params", rec.params},
         {"agents", Json::array()}};
  for (const AgentRecord& a : rec.agents) {
    j["agents"].push_back({{"id", a.id},
                           {"cost", a.cost},
                           {"path", io_detail::polyline_json(a.path)},
                           {"times", a.times},
                           {"raw_path", io_detail::polyline_json(a.raw_path)}});
  }
  return j;
}

inline SolutionRecord record_from_json(const Json& j) {
  using namespace io_detail;
  SolutionRecord rec;
  const Json& st = require(j, "status", "");
  if (!st.is_string()) throw InvalidScenario("status", "expected a string");
  rec.status = st.get<std::string>();
  const Json& seed = require(j, "seed", "");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw InvalidScenario("seed", "expected an integer");
  rec.seed = seed.get<std::uint64_t>();
  rec.soc = number(require(j, "soc", ""), "soc");
  rec.ct_iterations = integer(require(j, "ct_iterations", ""), "ct_iterations");
  rec.wall_time = number(require(j, "wall_time", ""), "wall_time");
  rec.params = j.contains("params") ? j["params"] : Json();
  const Json& agents = require(j, "agents", "");
  if (!agents.is_array()) throw InvalidScenario("agents", "expected an array");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string f = "agents[" + std::to_string(k) + "]";
    const Json& a = agents[k];
    AgentRecord ar;
    ar.id = integer(require(a, "id", f), f + ".id");
    ar.cost = number(require(a, "cost", f), f + ".cost");
    ar.path = polyline(require(a, "path", f), f + ".path");
    const Json& times = require(a, "times", f);
    if (!times.is_array() || times.size() != ar.path.size()) throw InvalidScenario(f + ".times", "one time per path point");
    for (std::size_t t = 0; t < times.size(); ++t) {
      ar.times.push_back(number(times[t], f + ".times[" + std::to_string(t) + "]"));
      if (t > 0 && !(ar.times[t] > ar.times[t - 1])) throw InvalidScenario(f + ".times", "must be strictly increasing");
    }
    if (a.contains("raw_path")) ar.raw_path = polyline(a["raw_path"], f + ".raw_path");
    rec.agents.push_back(std::move(ar));
  }
  return rec;
}

// Rebuilds plans from a record so that they can be checked independently.
inline std::map<AgentId, PlanResult> plans_of(const SolutionRecord& rec) {
  std::map<AgentId, PlanResult> out;
  for (const AgentRecord& a : rec.agents) {
    PlanResult r;
    r.smooth_path = a.path;
    r.raw_path = a.raw_path;
    r.cost = polyline_length(a.path);
    out.emplace(a.id, std::move(r));
  }
  return out;
}

inline std::string solution_text(const SolutionRecord& rec) { return record_to_json(rec).dump(2) + "\n"; }

inline void write_solution(const SolutionRecord& rec, const std::string& file) { write_text(file, solution_text(rec)); }

inline SolutionRecord read_solution(const std::string& file) { return record_from_json(parse_json(read_text(file), file)); }

struct SvgLayers {
  const std::map<AgentId, PlanResult>* paths = nullptr;
  const std::vector<Segment>* tree = nullptr;
  double scale = 1.0;  // pixels per world unit
};

// Obstacles grey, starts blue, goals green, smooth paths green, tree edges red.
inline std::string render_svg(const Scenario& sc, const SvgLayers& layers = {}) {
  const double k = layers.scale;
  const double H = sc.height;
  char buf[256];
  std::string out;
  auto fmt = [&](const char* f, auto... args) {
    std::snprintf(buf, sizeof buf, f, args...);
    out += buf;
  };
  fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.3f\" height=\"%.3f\" viewBox=\"0 0 %.3f %.3f\">\n", sc.width * k,
      H * k, sc.width * k, H * k);
  fmt("<rect class=\"world\" x=\"0\" y=\"0\" width=\"%.3f\" height=\"%.3f\" fill=\"white\" stroke=\"black\"/>\n", sc.width * k,
      H * k);
  for (const Rect& r : sc.obstacles) {
    fmt("<rect class=\"obstacle\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"#808080\"/>\n", r.x * k,
        (H - r.y_max()) * k, r.w * k, r.h * k);
  }
  const double stroke = std::max(0.5, 0.002 * std::max(sc.width, sc.height) * k);
  if (layers.tree) {
    for (const Segment& s : *layers.tree) {
      fmt("<line class=\"tree\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"red\" stroke-width=\"%.3f\"/>\n",
          s.a.x * k, (H - s.a.y) * k, s.b.x * k, (H - s.b.y) * k, 0.5 * stroke);
    }
  }
  if (layers.paths) {
    for (const auto& [id, r] : *layers.paths) {
      fmt("<polyline class=\"path\" data-agent=\"%d\" fill=\"none\" stroke=\"green\" stroke-width=\"%.3f\" points=\"", id,
          stroke);
      for (std::size_t i = 0; i < r.smooth_path.size(); ++i) {
        fmt(i == 0 ? "%.3f,%.3f" : " %.3f,%.3f", r.smooth_path[i].x * k, (H - r.smooth_path[i].y) * k);
      }
      out += "\"/>\n";
    }
  }
  for (const AgentSpec& a : sc.agents) {
    fmt("<circle class=\"start\" data-agent=\"%d\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"blue\"/>\n", a.id, a.start.x * k,
        (H - a.start.y) * k, a.radius * k);
    fmt("<circle class=\"goal\" data-agent=\"%d\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"green\"/>\n", a.id, a.goal.x * k,
        (H - a.goal.y) * k, a.radius * k);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cecbs
