#include "viewplan/scenario.hpp"

#include "viewplan/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace viewplan::scenario {

namespace {

constexpr int kRetryBudget = 10000;
constexpr int kMinVisibleProbes = 3;
constexpr std::uint64_t kCityStream = 1;
constexpr std::uint64_t kTargetStream = 2;

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Polygon2 rectangle(double x0, double y0, double x1, double y1) {
  return {Point2(x0, y0), Point2(x1, y0), Point2(x1, y1), Point2(x0, y1)};
}

/// Number of probe viewpoints (two altitude levels, a plumb point and rings of eight)
/// from which the target is visible.
int visible_probes(const visibility::Target& target, const visibility::Environment& env,
                   const visibility::SensorParams& sensor) {
  const visibility::VisibilityField field(target, env, sensor);
  if (!(field.floor() < field.ceiling())) return 0;
  const Point3& p = target.position;
  int count = 0;
  for (double level : {0.1, 0.5}) {
    const double z = field.floor() + level * (field.ceiling() - field.floor());
    const double dz = z - p.z();
    const double reach = std::sqrt(std::max(field.range() * field.range() - dz * dz, 0.0));
    count += field(Point3(p.x(), p.y(), z));
    for (double frac : {0.3, 0.6, 0.9})
      for (int k = 0; k < 8; ++k) {
        const double a = kTwoPi * k / 8;
        count += field(Point3(p.x() + frac * reach * std::cos(a), p.y() + frac * reach * std::sin(a), z));
      }
  }
  return count;
}

Point2 random_point_in(Rng& rng, const Eigen::AlignedBox2d& box) {
  return {uniform_in(rng, box.min().x(), box.max().x()), uniform_in(rng, box.min().y(), box.max().y())};
}

/// One candidate target of the given class, or nothing when the draw is unusable.
std::optional<visibility::Target> draw_target(Rng& rng, visibility::Placement cls, const visibility::Environment& env) {
  using visibility::Placement;
  visibility::Target t;
  t.placement = cls;
  switch (cls) {
    case Placement::Ground: {
      Eigen::AlignedBox2d box;
      for (const auto& v : env.region) box.extend(v);
      const Point2 q = random_point_in(rng, box);
      if (!geom::strictly_inside(q, env.region, 1.0)) return std::nullopt;
      for (const auto& o : env.objects)
        if (geom::point_in_polygon(q, o.footprint) || geom::distance_to_boundary(q, o.footprint) < 1.0)
          return std::nullopt;
      t.position = Point3(q.x(), q.y(), 0.0);
      return t;
    }
    case Placement::Wall: {
      const auto& o = env.objects[rng.below(env.objects.size())];
      const auto& f = o.footprint;
      double perimeter = geom::polygon_perimeter(f);
      double s = rng.uniform() * perimeter;
      std::size_t e = 0;
      for (; e + 1 < f.size(); ++e) {
        const double len = (f[(e + 1) % f.size()] - f[e]).norm();
        if (s < len) break;
        s -= len;
      }
      const Point2 a = f[e], b = f[(e + 1) % f.size()];
      const double t_edge = std::clamp(s / (b - a).norm(), 0.05, 0.95);
      const Point2 q = a + t_edge * (b - a);
      t.position = Point3(q.x(), q.y(), rng.uniform() * o.height);
      return t;
    }
    case Placement::Roof: {
      const auto& o = env.objects[rng.below(env.objects.size())];
      const Point2 q = random_point_in(rng, o.bounds());
      if (!geom::strictly_inside(q, o.footprint, 1.0)) return std::nullopt;
      t.position = Point3(q.x(), q.y(), o.height);
      return t;
    }
  }
  return std::nullopt;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int parse_count(const std::string& token, const std::string& id) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || v < 1)
    throw ValidationError("algorithm id", "'" + id + "': '" + token + "' is not a positive count");
  return v;
}

Strategy parse_strategy(const std::string& token, const std::string& id) {
  if (token == "RFAC") return Strategy::RandomFace;
  if (token == "E3D") return Strategy::Edge3D;
  if (token == "GWF") return Strategy::GlobalWeightedFace;
  throw ValidationError("algorithm id", "'" + id + "': unknown sampling strategy '" + token + "'");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RandomFace: return "RFAC";
    case Strategy::Edge3D: return "E3D";
    case Strategy::GlobalWeightedFace: return "GWF";
  }
  return "?";
}

/// Trial identity without the solver, so matched 3D DTSPN and METSPN trials draw the same samples.
std::string sampling_key(const TrialRecord& r, const AlgorithmId& a) {
  const bool spatial = a.method == Method::Dtspn3D || a.method == Method::Metspn3D;
  return std::to_string(r.num_targets) + "|" + (spatial ? std::string("3D-") + strategy_name(a.strategy) : a.family()) +
         "|" + std::to_string(r.n_pts) + "|" + std::to_string(r.n_psi) + "|" + std::to_string(r.n_gamma);
}

std::string status_of(const std::exception& e) {
  std::string s;
  if (const auto* v = dynamic_cast<const ValidationError*>(&e))
    s = v->constraint();
  else if (dynamic_cast<const InfeasibleError*>(&e))
    s = std::string("infeasible: ") + e.what();
  else
    s = e.what();
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return "error:" + s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void ScenarioParams::validate(bool planar) const {
  if (!(region_width > 0.0) || !(region_depth > 0.0))
    throw ValidationError("region size", "region width and depth must be positive");
  if (num_objects < 0) throw ValidationError("object count", "object count must be non-negative");
  if (num_targets < 1) throw ValidationError("target count", "at least one target is required");
  if (!(footprint_min > 0.0) || !(footprint_max >= footprint_min))
    throw ValidationError("footprint size", "need 0 < footprint_min <= footprint_max");
  if (!(street_gap >= 0.0)) throw ValidationError("footprint size", "street gap must be non-negative");
  if (num_objects > 0 && footprint_min + 2.0 * street_gap > std::min(region_width, region_depth))
    throw ValidationError("object density", "the smallest building does not fit inside the region");
  if (!(height_min > 0.0) || !(height_max >= height_min) || !(height_cap > 0.0))
    throw ValidationError("building heights", "need 0 < height_min <= height_max and a positive cap");
  if (placement.ground < 0.0 || placement.wall < 0.0 || placement.roof < 0.0 ||
      !(placement.ground + placement.wall + placement.roof > 0.0))
    throw ValidationError("placement weights", "placement weights must be non-negative with a positive sum");
  if (num_objects == 0 && !(placement.ground > 0.0))
    throw ValidationError("placement weights", "wall and roof targets need buildings");
  sensor.validate();
  vehicle.validate();

  const double h = num_objects > 0 ? height_bound() : 0.0;
  const double z_min = h + 2.0 * vehicle.rho_min + 1.0;
  const double z_max = h + sensor.d_max;
  if (!(z_min <= sensor.h_view + h && sensor.h_view + h <= z_max))
    throw ValidationError("viewing altitude band",
                          "z_min = " + fmt(z_min) + " exceeds h_view + h_max = " + fmt(sensor.h_view + h) +
                              " at the tallest building; raise h_view or lower rho_min");
  if (!(z_min <= sensor.d_max))
    throw ValidationError("viewing range", "z_min = " + fmt(z_min) + " exceeds d_max = " + fmt(sensor.d_max) +
                                               "; no viewpoint of a ground target is in range");
  if (planar && !(h + sensor.h_view <= sensor.d_max))
    throw ValidationError("common altitude", "h_max + h_view = " + fmt(h + sensor.h_view) + " exceeds d_max = " +
                                                 fmt(sensor.d_max) + "; no constant altitude sees every target");
}

void validate_scene(const Scene& scene, bool planar) {
  const auto& env = scene.env;
  env.validate();
  scene.sensor.validate();
  scene.vehicle.validate();
  if (scene.targets.empty()) throw ValidationError("target count", "the scene has no targets");
  for (const auto& t : scene.targets) visibility::validate_target(t, env);

  const double h = env.h_max();
  const double d = scene.sensor.d_max, hv = scene.sensor.h_view;
  if (!(env.z_min > h + 2.0 * scene.vehicle.rho_min))
    throw ValidationError("airspace clearance", "z_min = " + fmt(env.z_min) + " must exceed h_max + 2 rho_min = " +
                                                    fmt(h + 2.0 * scene.vehicle.rho_min));
  if (!(env.z_min <= hv + h && hv + h <= env.z_max))
    throw ValidationError("viewing altitude band", "h_view + h_max = " + fmt(hv + h) + " lies outside [z_min, z_max] = [" +
                                                       fmt(env.z_min) + ", " + fmt(env.z_max) + "]");
  if (!(env.z_min <= d))
    throw ValidationError("viewing range", "z_min = " + fmt(env.z_min) + " exceeds d_max = " + fmt(d));
  for (std::size_t i = 0; i < scene.targets.size(); ++i)
    for (std::size_t j = i + 1; j < scene.targets.size(); ++j) {
      const double dist = (scene.targets[i].position - scene.targets[j].position).norm();
      if (!(dist > 2.0 * d))
        throw ValidationError("target separation", "targets " + std::to_string(i) + " and " + std::to_string(j) +
                                                       " are " + fmt(dist) + " m apart, need more than 2 d_max = " +
                                                       fmt(2.0 * d));
    }
  if (planar && !(h + hv <= d))
    throw ValidationError("common altitude", "h_max + h_view = " + fmt(h + hv) + " exceeds d_max = " + fmt(d) +
                                                 "; no constant altitude sees every target");
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

visibility::Environment generate_city(const ScenarioParams& params) {
  params.validate();
  Rng rng(params.seed, kCityStream);
  visibility::Environment env;
  env.region = rectangle(0.0, 0.0, params.region_width, params.region_depth);
  std::vector<Eigen::AlignedBox2d> placed;
  const double gap = params.street_gap;
  for (int i = 0; i < params.num_objects; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < kRetryBudget && !ok; ++attempt) {
      const double w = uniform_in(rng, params.footprint_min, params.footprint_max);
      const double d = uniform_in(rng, params.footprint_min, params.footprint_max);
      if (w + 2.0 * gap > params.region_width || d + 2.0 * gap > params.region_depth) continue;
      const double x0 = uniform_in(rng, gap, params.region_width - gap - w);
      const double y0 = uniform_in(rng, gap, params.region_depth - gap - d);
      const Eigen::AlignedBox2d box(Point2(x0, y0), Point2(x0 + w, y0 + d));
      ok = std::none_of(placed.begin(), placed.end(), [&](const Eigen::AlignedBox2d& o) {
        return box.min().x() < o.max().x() + gap && o.min().x() < box.max().x() + gap &&
               box.min().y() < o.max().y() + gap && o.min().y() < box.max().y() + gap;
      });
      if (!ok) continue;
      placed.push_back(box);
      const double h = std::min(uniform_in(rng, params.height_min, params.height_max), params.height_cap);
      env.objects.push_back({rectangle(x0, y0, x0 + w, y0 + d), h});
    }
    if (!ok)
      throw ValidationError("object density", "could not place building " + std::to_string(i + 1) + " of " +
                                                  std::to_string(params.num_objects) + " within " +
                                                  std::to_string(kRetryBudget) + " attempts");
  }
  const double h = env.h_max();
  env.z_min = h + 2.0 * params.vehicle.rho_min + 1.0;
  env.z_max = h + params.sensor.d_max;
  return env;
}

std::vector<visibility::Target> place_targets(const visibility::Environment& env, const ScenarioParams& params) {
  using visibility::Placement;
  params.validate();
  Rng rng(params.seed, kTargetStream);
  double w[3] = {params.placement.ground, params.placement.wall, params.placement.roof};
  if (env.objects.empty()) w[1] = w[2] = 0.0;
  const double total = w[0] + w[1] + w[2];
  if (!(total > 0.0)) throw ValidationError("placement weights", "no placement class is available");

  std::vector<visibility::Target> out;
  for (int i = 0; i < params.num_targets; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < kRetryBudget && !ok; ++attempt) {
      const double u = rng.uniform() * total;
      const Placement cls = u < w[0] ? Placement::Ground : (u < w[0] + w[1] ? Placement::Wall : Placement::Roof);
      const auto t = draw_target(rng, cls, env);
      if (!t) continue;
      if (std::any_of(out.begin(), out.end(), [&](const visibility::Target& o) {
            return !((o.position - t->position).norm() > params.separation());
          }))
        continue;
      try {
        visibility::validate_target(*t, env);
      } catch (const ValidationError&) {
        continue;
      }
      if (visible_probes(*t, env, params.sensor) < kMinVisibleProbes) continue;
      out.push_back(*t);
      ok = true;
    }
    if (!ok)
      throw ValidationError("target separation", "could not place target " + std::to_string(i + 1) + " of " +
                                                     std::to_string(params.num_targets) +
                                                     " more than 2 d_max = " + fmt(params.separation()) +
                                                     " m from the others within " + std::to_string(kRetryBudget) +
                                                     " attempts");
  }
  return out;
}

Scene generate_scene(const ScenarioParams& params, bool planar) {
  params.validate(planar);
  Scene scene;
  scene.env = generate_city(params);
  scene.targets = place_targets(scene.env, params);
  scene.sensor = params.sensor;
  scene.vehicle = params.vehicle;
  validate_scene(scene, planar);
  return scene;
}

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

std::string AlgorithmId::family() const {
  switch (method) {
    case Method::OverheadDtsp: return "2D-DTSP";
    case Method::EntryPose2D: return "2D-DTSPN-ETRY";
    case Method::Dtspn3D: return std::string("3D-DTSPN-") + strategy_name(strategy);
    case Method::Metspn3D: return std::string("3D-METSPN-") + strategy_name(strategy);
  }
  return "?";
}

std::string AlgorithmId::to_string() const {
  if (method == Method::OverheadDtsp) return family() + "-" + std::to_string(n_psi);
  return family() + "-" + std::to_string(n_psi) + "-" + std::to_string(n_pts);
}

AlgorithmId parse_algorithm(const std::string& id) {
  const auto tok = split(id, '-');
  AlgorithmId a;
  auto bad = [&] {
    return ValidationError("algorithm id", "'" + id +
                                               "' is not one of 2D-DTSP-k, 2D-DTSPN-ETRY-npsi-npts, "
                                               "3D-DTSPN-{RFAC|E3D|GWF}-npsi-npts, 3D-METSPN-{RFAC|E3D|GWF}-npsi-npts");
  };
  if (tok.size() == 3 && tok[0] == "2D" && tok[1] == "DTSP") {
    a.method = Method::OverheadDtsp;
    a.n_psi = parse_count(tok[2], id);
    a.n_pts = 1;
    return a;
  }
  if (tok.size() != 5) throw bad();
  if (tok[0] == "2D" && tok[1] == "DTSPN" && tok[2] == "ETRY") {
    a.method = Method::EntryPose2D;
  } else if (tok[0] == "3D" && (tok[1] == "DTSPN" || tok[1] == "METSPN")) {
    a.method = tok[1] == "DTSPN" ? Method::Dtspn3D : Method::Metspn3D;
    a.strategy = parse_strategy(tok[2], id);
  } else {
    throw bad();
  }
  a.n_psi = parse_count(tok[3], id);
  a.n_pts = parse_count(tok[4], id);
  return a;
}

AlgorithmId make_algorithm(const std::string& family, int n_psi, int n_pts) {
  if (family == "2D-DTSP") return parse_algorithm(family + "-" + std::to_string(n_psi));
  return parse_algorithm(family + "-" + std::to_string(n_psi) + "-" + std::to_string(n_pts));
}

PlanResult plan(const Scene& scene, const std::vector<geom::TriMesh>& volumes, const AlgorithmId& alg,
                const PlanOptions& options) {
  if (volumes.size() != scene.targets.size())
    throw ValidationError("volume count", "expected one visibility volume per target");
  const auto start = std::chrono::steady_clock::now();
  PlanResult r;
  sampling::SamplingParams sp;
  sp.n_pts = alg.n_pts;
  sp.n_psi = alg.n_psi;
  sp.n_gamma = options.n_gamma;
  sp.n_slice = options.n_slice;
  sp.gamma_min = options.gamma_min;
  sp.gamma_max = options.gamma_max;
  sp.seed = options.seed;
  sp.validate();
  if (sp.gamma_min < scene.vehicle.gamma_min || sp.gamma_max > scene.vehicle.gamma_max)
    throw ValidationError("pitch range", "sampled pitch range exceeds the vehicle's pitch limits");

  switch (alg.method) {
    case Method::OverheadDtsp:
    case Method::EntryPose2D: {
      const double z = sampling::optimized_altitude(volumes, sp.n_slice);
      r.altitude = z;
      r.samples = alg.method == Method::OverheadDtsp ? sampling::sample_overhead(scene.targets, z, sp.n_psi)
                                                     : sampling::sample_entry_poses(volumes, z, sp.n_pts, sp.n_psi);
      r.tour = tour::plan_dtspn(r.samples, tour::CostMode::Planar2D, scene.vehicle, options.solve, options.seed);
      break;
    }
    case Method::Dtspn3D:
    case Method::Metspn3D: {
      switch (alg.strategy) {
        case Strategy::RandomFace: r.samples = sampling::sample_random_face(volumes, sp); break;
        case Strategy::Edge3D: r.samples = sampling::sample_edge_3d(volumes, sp); break;
        case Strategy::GlobalWeightedFace: r.samples = sampling::sample_global_weighted_face(volumes, sp); break;
      }
      r.tour = alg.method == Method::Dtspn3D
                   ? tour::plan_dtspn(r.samples, tour::CostMode::Exact3D, scene.vehicle, options.solve, options.seed)
                   : tour::plan_metspn(r.samples, scene.vehicle, options.solve, options.seed);
      break;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

std::string TrialRecord::key() const {
  return std::to_string(seed) + "|" + std::to_string(num_targets) + "|" + algorithm + "|" + std::to_string(n_pts) +
         "|" + std::to_string(n_psi) + "|" + std::to_string(n_gamma);
}

std::string to_csv_row(const TrialRecord& r) {
  char clock[40];
  std::snprintf(clock, sizeof clock, "%.6f", r.wall_clock);
  return std::to_string(r.seed) + "," + std::to_string(r.num_targets) + "," + r.algorithm + "," +
         std::to_string(r.n_pts) + "," + std::to_string(r.n_psi) + "," + std::to_string(r.n_gamma) + "," +
         fmt(r.length) + "," + fmt(r.normalized_cost) + "," + clock + "," + r.status;
}

TrialRecord parse_csv_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 10) throw IoError("CSV row needs 10 fields: '" + line + "'");
  TrialRecord r;
  try {
    r.seed = std::stoull(f[0]);
    r.num_targets = std::stoi(f[1]);
    r.algorithm = f[2];
    r.n_pts = std::stoi(f[3]);
    r.n_psi = std::stoi(f[4]);
    r.n_gamma = std::stoi(f[5]);
    r.length = std::stod(f[6]);
    r.normalized_cost = std::stod(f[7]);
    r.wall_clock = std::stod(f[8]);
  } catch (const std::exception&) {
    throw IoError("malformed CSV row: '" + line + "'");
  }
  r.status = f[9];
  return r;
}

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::vector<TrialRecord> out;
  if (!std::getline(in, line)) return out;
  if (line != kCsvHeader) throw IoError(path + ": unexpected CSV header");
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_csv_row(line));
  return out;
}

std::uint64_t trial_seed(std::uint64_t scene_seed, const std::string& key) {
  return splitmix(fnv1a(key) ^ splitmix(scene_seed));
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                        const std::function<void(const TrialRecord&, const tour::Tour*)>& on_trial) {
  std::vector<AlgorithmId> combos;
  for (const auto& family : config.algorithms) {
    if (family == "2D-DTSP") {
      for (int psi : config.n_psi) combos.push_back(make_algorithm(family, psi, 1));
      continue;
    }
    for (int psi : config.n_psi)
      for (int pts : config.n_pts) combos.push_back(make_algorithm(family, psi, pts));
  }

  std::vector<TrialRecord> records;
  std::set<std::string> done;
  if (config.resume && !config.output.empty() && std::ifstream(config.output).good()) {
    records = read_csv(config.output);
    for (const auto& r : records) done.insert(r.key());
  }
  std::ofstream out;
  if (!config.output.empty()) {
    const bool append = config.resume && !records.empty();
    out.open(config.output, append ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot write " + config.output);
    if (!append) out << kCsvHeader << '\n' << std::flush;
  }
  auto emit = [&](const TrialRecord& r, const tour::Tour* t) {
    records.push_back(r);
    done.insert(r.key());
    if (out.is_open()) out << to_csv_row(r) << '\n' << std::flush;
    if (on_trial) on_trial(r, t);
  };

  for (int m : config.target_counts)
    for (std::uint64_t seed : config.seeds) {
      std::vector<TrialRecord> pending;
      std::vector<AlgorithmId> pending_algs;
      for (const auto& a : combos) {
        TrialRecord r;
        r.seed = seed;
        r.num_targets = m;
        r.algorithm = a.to_string();
        r.n_pts = a.n_pts;
        r.n_psi = a.n_psi;
        r.n_gamma = config.n_gamma;
        if (done.count(r.key())) continue;
        pending.push_back(r);
        pending_algs.push_back(a);
      }
      if (pending.empty()) continue;

      ScenarioParams sp = config.scenario;
      sp.num_targets = m;
      sp.seed = seed;
      Scene scene;
      std::vector<geom::TriMesh> volumes;
      try {
        scene = generate_scene(sp);
        visibility::MeshingOptions mo;
        mo.resolution = config.resolution;
        volumes = visibility::build_visibility_meshes(scene.targets, scene.env, scene.sensor, mo);
      } catch (const std::exception& e) {
        for (auto& r : pending) {
          r.status = status_of(e);
          emit(r, nullptr);
        }
        continue;
      }

      for (std::size_t k = 0; k < pending.size(); ++k) {
        TrialRecord r = pending[k];
        const AlgorithmId& a = pending_algs[k];
        PlanOptions po;
        po.n_gamma = config.n_gamma;
        po.n_slice = config.n_slice;
        po.seed = trial_seed(seed, sampling_key(r, a));
        try {
          if (a.method == Method::OverheadDtsp || a.method == Method::EntryPose2D) validate_scene(scene, true);
          const PlanResult res = plan(scene, volumes, a, po);
          tour::check_tour(res.tour, scene.targets.size());
          r.length = res.tour.length;
          r.normalized_cost = res.tour.normalized_cost;
          r.wall_clock = res.seconds;
          emit(r, &res.tour);
        } catch (const std::exception& e) {
          r.status = status_of(e);
          emit(r, nullptr);
        }
      }
    }
  return records;
}

}  // namespace viewplan::scenario
