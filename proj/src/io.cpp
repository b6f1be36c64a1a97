#include "viewplan/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace viewplan::io {

namespace {

json point2(const Point2& p) { return json::array({round9(p.x()), round9(p.y())}); }

json polygon(const Polygon2& poly) {
  json a = json::array();
  for (const auto& p : poly) a.push_back(point2(p));
  return a;
}

/// Field access that reports the JSON path on failure.
template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw IoError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return get<T>(obj, key, where);
}

Polygon2 parse_polygon(const json& a, const std::string& where) {
  if (!a.is_array()) throw IoError(where + ": expected an array of [x, y] pairs");
  Polygon2 out;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw IoError(where + ": expected [x, y] pairs");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

json config_json(const dubins::Configuration& c) {
  return {{"x", round9(c.x)}, {"y", round9(c.y)}, {"z", round9(c.z)}, {"psi", round9(c.psi)}, {"gamma", round9(c.gamma)}};
}

json sensor_json(const visibility::SensorParams& s) { return {{"d_max", round9(s.d_max)}, {"h_view", round9(s.h_view)}}; }

json vehicle_json(const dubins::VehicleParams& v) {
  return {{"rho_min", round9(v.rho_min)},
          {"gamma_min", round9(v.gamma_min)},
          {"gamma_max", round9(v.gamma_max)},
          {"v", round9(v.speed)}};
}

visibility::SensorParams parse_sensor(const json& s, visibility::SensorParams out, const std::string& where) {
  out.d_max = get_or(s, "d_max", out.d_max, where);
  out.h_view = get_or(s, "h_view", out.h_view, where);
  return out;
}

dubins::VehicleParams parse_vehicle(const json& v, dubins::VehicleParams out, const std::string& where) {
  out.rho_min = get_or(v, "rho_min", out.rho_min, where);
  out.gamma_min = get_or(v, "gamma_min", out.gamma_min, where);
  out.gamma_max = get_or(v, "gamma_max", out.gamma_max, where);
  out.speed = get_or(v, "v", out.speed, where);
  return out;
}

}  // namespace

double round9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path);
}

json scene_to_json(const scenario::Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.env.objects) objects.push_back({{"footprint", polygon(o.footprint)}, {"height", round9(o.height)}});
  json targets = json::array();
  for (const auto& t : scene.targets)
    targets.push_back({{"x", round9(t.position.x())},
                       {"y", round9(t.position.y())},
                       {"z", round9(t.position.z())},
                       {"class", std::string(visibility::to_string(t.placement))}});
  json doc = {{"region", polygon(scene.env.region)},
              {"z_min", round9(scene.env.z_min)},
              {"z_max", round9(scene.env.z_max)},
              {"objects", objects},
              {"targets", targets},
              {"sensor", sensor_json(scene.sensor)},
              {"vehicle", vehicle_json(scene.vehicle)}};
  if (scene.env.airspace_margin != 0.0) doc["airspace_margin"] = round9(scene.env.airspace_margin);
  return doc;
}

scenario::Scene scene_from_json(const json& doc) {
  const std::string w = "scene";
  if (!doc.is_object()) throw IoError("scene: expected a JSON object");
  scenario::Scene s;
  s.env.region = parse_polygon(get<json>(doc, "region", w), "scene.region");
  s.env.z_min = get<double>(doc, "z_min", w);
  s.env.z_max = get<double>(doc, "z_max", w);
  s.env.airspace_margin = get_or(doc, "airspace_margin", 0.0, w);
  const json objects = get_or(doc, "objects", json::array(), w);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string wo = "scene.objects[" + std::to_string(i) + "]";
    s.env.objects.push_back({parse_polygon(get<json>(objects[i], "footprint", wo), wo + ".footprint"),
                             get<double>(objects[i], "height", wo)});
  }
  const json targets = get<json>(doc, "targets", w);
  if (!targets.is_array()) throw IoError("scene.targets: expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string wt = "scene.targets[" + std::to_string(i) + "]";
    visibility::Target t;
    t.position = Point3(get<double>(targets[i], "x", wt), get<double>(targets[i], "y", wt), get<double>(targets[i], "z", wt));
    try {
      t.placement = visibility::parse_placement(get<std::string>(targets[i], "class", wt));
    } catch (const ValidationError& e) {
      throw IoError(wt + ": " + e.what());
    }
    s.targets.push_back(t);
  }
  s.sensor = parse_sensor(get<json>(doc, "sensor", w), {}, "scene.sensor");
  s.vehicle = parse_vehicle(get<json>(doc, "vehicle", w), {}, "scene.vehicle");
  return s;
}

scenario::Scene read_scene(const std::string& path) { return scene_from_json(read_json(path)); }

void write_scene(const std::string& path, const scenario::Scene& scene) { write_text(path, dump(scene_to_json(scene))); }

json tour_to_json(const tour::Tour& t, const dubins::VehicleParams& vehicle, const TourInfo& info) {
  json configs = json::array();
  for (std::size_t i = 0; i < t.configs.size(); ++i) {
    json c = config_json(t.configs[i]);
    c["target"] = t.targets[i];
    configs.push_back(c);
  }
  json legs = json::array();
  bool planar = false;
  for (const auto& leg : t.legs) {
    json l = {{"length", round9(leg.length())}};
    if (const auto* p2 = std::get_if<dubins::DubinsPath2>(&leg.path)) {
      planar = true;
      l["word"] = std::string(dubins::to_string(p2->word));
      l["altitude"] = round9(leg.altitude);
    } else {
      const auto& p3 = std::get<dubins::DubinsPath3>(leg.path);
      l["word"] = std::string(dubins::to_string(p3.horizontal.word));
      l["vertical_word"] = std::string(dubins::to_string(p3.vertical.word));
      l["rho_h"] = round9(p3.rho_h);
      l["extra_turns"] = p3.extra_turns;
    }
    if (info.polyline_step > 0.0) {
      json poly = json::array();
      for (const auto& c : leg.sample(info.polyline_step))
        poly.push_back(json::array({round9(c.x), round9(c.y), round9(c.z)}));
      l["polyline"] = poly;
    }
    legs.push_back(l);
  }
  json doc = {{"algorithm", info.algorithm},
              {"mode", planar ? "planar" : "3d"},
              {"seed", info.seed},
              {"rho_min", round9(vehicle.rho_min)},
              {"length", round9(t.length)},
              {"normalized_cost", round9(t.normalized_cost)},
              {"wall_clock_s", round9(info.wall_clock)},
              {"configurations", configs},
              {"legs", legs}};
  if (info.altitude) doc["altitude"] = round9(*info.altitude);
  return doc;
}

json samples_to_json(const sampling::ClusterSamples& samples) {
  json clusters = json::array();
  for (const auto& c : samples) {
    json configs = json::array();
    for (const auto& q : c.configs) configs.push_back(config_json(q));
    clusters.push_back({{"target", c.target}, {"configurations", configs}});
  }
  return {{"clusters", clusters}};
}

sampling::ClusterSamples samples_from_json(const json& doc) {
  const json clusters = get<json>(doc, "clusters", "samples");
  sampling::ClusterSamples out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::string w = "samples.clusters[" + std::to_string(i) + "]";
    sampling::Cluster c;
    c.target = get<std::size_t>(clusters[i], "target", w);
    for (const auto& q : get<json>(clusters[i], "configurations", w))
      c.configs.emplace_back(get<double>(q, "x", w), get<double>(q, "y", w), get<double>(q, "z", w),
                             get<double>(q, "psi", w), get<double>(q, "gamma", w));
    out.push_back(std::move(c));
  }
  return out;
}

scenario::ExperimentConfig experiment_from_json(const json& doc) {
  const std::string w = "experiment";
  if (!doc.is_object()) throw IoError("experiment: expected a JSON object");
  scenario::ExperimentConfig c;
  c.target_counts = get_or(doc, "target_counts", c.target_counts, w);
  c.seeds = get_or(doc, "seeds", c.seeds, w);
  c.algorithms = get_or(doc, "algorithms", c.algorithms, w);
  c.n_pts = get_or(doc, "n_pts", c.n_pts, w);
  c.n_psi = get_or(doc, "n_psi", c.n_psi, w);
  c.n_gamma = get_or(doc, "n_gamma", c.n_gamma, w);
  c.n_slice = get_or(doc, "n_slice", c.n_slice, w);
  c.resolution = get_or(doc, "resolution", c.resolution, w);
  c.output = get_or(doc, "output", c.output, w);
  if (doc.contains("scenario")) {
    const json& s = doc["scenario"];
    const std::string ws = "experiment.scenario";
    auto& p = c.scenario;
    p.region_width = get_or(s, "region_width", p.region_width, ws);
    p.region_depth = get_or(s, "region_depth", p.region_depth, ws);
    p.num_objects = get_or(s, "num_objects", p.num_objects, ws);
    p.footprint_min = get_or(s, "footprint_min", p.footprint_min, ws);
    p.footprint_max = get_or(s, "footprint_max", p.footprint_max, ws);
    p.street_gap = get_or(s, "street_gap", p.street_gap, ws);
    p.height_min = get_or(s, "height_min", p.height_min, ws);
    p.height_max = get_or(s, "height_max", p.height_max, ws);
    p.height_cap = get_or(s, "height_cap", p.height_cap, ws);
    if (s.contains("placement")) {
      const json& pl = s["placement"];
      p.placement.ground = get_or(pl, "ground", p.placement.ground, ws + ".placement");
      p.placement.wall = get_or(pl, "wall", p.placement.wall, ws + ".placement");
      p.placement.roof = get_or(pl, "roof", p.placement.roof, ws + ".placement");
    }
    if (s.contains("sensor")) p.sensor = parse_sensor(s["sensor"], p.sensor, ws + ".sensor");
    if (s.contains("vehicle")) p.vehicle = parse_vehicle(s["vehicle"], p.vehicle, ws + ".vehicle");
  }
  for (const auto& a : c.algorithms) scenario::make_algorithm(a, 1, 1);  // rejects unknown families early
  return c;
}

json experiment_to_json(const scenario::ExperimentConfig& c) {
  const auto& p = c.scenario;
  return {{"target_counts", c.target_counts},
          {"seeds", c.seeds},
          {"algorithms", c.algorithms},
          {"n_pts", c.n_pts},
          {"n_psi", c.n_psi},
          {"n_gamma", c.n_gamma},
          {"n_slice", c.n_slice},
          {"resolution", round9(c.resolution)},
          {"output", c.output},
          {"scenario",
           {{"region_width", round9(p.region_width)},
            {"region_depth", round9(p.region_depth)},
            {"num_objects", p.num_objects},
            {"footprint_min", round9(p.footprint_min)},
            {"footprint_max", round9(p.footprint_max)},
            {"street_gap", round9(p.street_gap)},
            {"height_min", round9(p.height_min)},
            {"height_max", round9(p.height_max)},
            {"height_cap", round9(p.height_cap)},
            {"placement", {{"ground", p.placement.ground}, {"wall", p.placement.wall}, {"roof", p.placement.roof}}},
            {"sensor", sensor_json(p.sensor)},
            {"vehicle", vehicle_json(p.vehicle)}}}};
}

}  // namespace viewplan::io
