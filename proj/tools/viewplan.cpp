#include "viewplan/io.hpp"
#include "viewplan/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace viewplan;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kInfeasible = 3, kIo = 4 };

struct GenArgs {
  scenario::ScenarioParams params;
  std::string out;
  bool planar = false;
};

struct PlanArgs {
  std::string scene;
  std::string alg;
  std::uint64_t seed = 1;
  int n_gamma = 1;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  int n_slice = 20;
  double resolution = 0.0;
  bool exact = false;
  std::string out = "tour.json";
  std::string mesh_dir;
  bool polyline = false;
  double polyline_step = 0.0;
  std::string samples_out;
};

struct ExperimentArgs {
  std::string config;
  std::string output;
  bool resume = false;
  bool quiet = false;
};

int cmd_gen(const GenArgs& a) {
  const auto scene = scenario::generate_scene(a.params, a.planar);
  io::write_scene(a.out, scene);
  std::printf("wrote %s: %zu buildings, %zu targets, z in [%.9g, %.9g]\n", a.out.c_str(), scene.env.objects.size(),
              scene.targets.size(), scene.env.z_min, scene.env.z_max);
  return kOk;
}

int cmd_plan(const PlanArgs& a) {
  const auto alg = scenario::parse_algorithm(a.alg);
  const bool planar = alg.method == scenario::Method::OverheadDtsp || alg.method == scenario::Method::EntryPose2D;
  const auto scene = io::read_scene(a.scene);
  scenario::validate_scene(scene, planar);

  visibility::MeshingOptions mo;
  mo.resolution = a.resolution;
  const auto volumes = visibility::build_visibility_meshes(scene.targets, scene.env, scene.sensor, mo);
  if (!a.mesh_dir.empty()) {
    std::filesystem::create_directories(a.mesh_dir);
    for (std::size_t i = 0; i < volumes.size(); ++i)
      geom::write_obj((std::filesystem::path(a.mesh_dir) / ("volume_" + std::to_string(i) + ".obj")).string(), volumes[i]);
  }

  scenario::PlanOptions po;
  po.n_gamma = a.n_gamma;
  po.gamma_min = a.gamma_min;
  po.gamma_max = a.gamma_max;
  po.n_slice = a.n_slice;
  po.seed = a.seed;
  po.solve = a.exact ? tour::SolveMode::Exact : tour::SolveMode::Heuristic;
  const auto result = scenario::plan(scene, volumes, alg, po);
  tour::check_tour(result.tour, scene.targets.size());

  io::TourInfo info;
  info.algorithm = alg.to_string();
  info.seed = a.seed;
  info.altitude = result.altitude;
  info.wall_clock = result.seconds;
  if (a.polyline) info.polyline_step = a.polyline_step > 0.0 ? a.polyline_step : scene.vehicle.rho_min / 10.0;
  io::write_text(a.out, io::dump(io::tour_to_json(result.tour, scene.vehicle, info)));
  if (!a.samples_out.empty()) io::write_text(a.samples_out, io::dump(io::samples_to_json(result.samples)));

  std::printf("%s: length %.9g m, normalized cost %.9g, %.3f s", info.algorithm.c_str(), result.tour.length,
              result.tour.normalized_cost, result.seconds);
  if (result.altitude) std::printf(", z* = %.9g m", *result.altitude);
  std::printf("\n");
  return kOk;
}

int cmd_experiment(const ExperimentArgs& a) {
  auto config = io::experiment_from_json(io::read_json(a.config));
  if (!a.output.empty()) config.output = a.output;
  if (config.output.empty()) throw ValidationError("experiment output", "no output CSV path in the config or on the command line");
  config.resume = a.resume;
  std::size_t ok = 0, failed = 0;
  const auto records = scenario::run_experiment(config, [&](const scenario::TrialRecord& r, const tour::Tour*) {
    (r.status == "ok" ? ok : failed) += 1;
    if (!a.quiet) std::fprintf(stderr, "%s\n", scenario::to_csv_row(r).c_str());
  });
  std::printf("%zu records in %s (%zu new ok, %zu new failed)\n", records.size(), config.output.c_str(), ok, failed);
  return kOk;
}

int report(const char* kind, const std::string& what, int code) {
  std::fprintf(stderr, "viewplan: %s: %s\n", kind, what.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inspection tours for a 3D Dubins airplane over building-occluded visibility volumes"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic city and targets as scene JSON");
  auto& sp = gen.params;
  g->add_option("--targets", sp.num_targets, "Number of targets")->capture_default_str();
  g->add_option("--seed", sp.seed, "Scene seed")->capture_default_str();
  g->add_option("--out", gen.out, "Scene JSON path")->required();
  g->add_option("--width", sp.region_width, "Region east extent (m)")->capture_default_str();
  g->add_option("--depth", sp.region_depth, "Region north extent (m)")->capture_default_str();
  g->add_option("--objects", sp.num_objects, "Number of buildings")->capture_default_str();
  g->add_option("--footprint-min", sp.footprint_min, "Smallest building side (m)")->capture_default_str();
  g->add_option("--footprint-max", sp.footprint_max, "Largest building side (m)")->capture_default_str();
  g->add_option("--street-gap", sp.street_gap, "Clearance between buildings (m)")->capture_default_str();
  g->add_option("--height-min", sp.height_min, "Lowest drawn building height (m)")->capture_default_str();
  g->add_option("--height-max", sp.height_max, "Highest drawn building height (m)")->capture_default_str();
  g->add_option("--height-cap", sp.height_cap, "Building height cap (m)")->capture_default_str();
  g->add_option("--ground", sp.placement.ground, "Weight of ground targets")->capture_default_str();
  g->add_option("--wall", sp.placement.wall, "Weight of wall targets")->capture_default_str();
  g->add_option("--roof", sp.placement.roof, "Weight of roof targets")->capture_default_str();
  g->add_option("--d-max", sp.sensor.d_max, "Sensor range (m)")->capture_default_str();
  g->add_option("--h-view", sp.sensor.h_view, "Minimum height above a target (m)")->capture_default_str();
  g->add_option("--rho-min", sp.vehicle.rho_min, "Minimum turn radius (m)")->capture_default_str();
  g->add_option("--gamma-min", sp.vehicle.gamma_min, "Lowest pitch (rad)")->capture_default_str();
  g->add_option("--gamma-max", sp.vehicle.gamma_max, "Highest pitch (rad)")->capture_default_str();
  g->add_flag("--planar", gen.planar, "Also require a common altitude for constant-altitude tours");

  PlanArgs pl;
  auto* p = app.add_subcommand("plan", "Plan a tour over a scene");
  p->add_option("scene", pl.scene, "Scene JSON")->required();
  p->add_option("--alg", pl.alg, "Algorithm id, e.g. 3D-DTSPN-RFAC-8-32 or 2D-DTSP-8")->required();
  p->add_option("--seed", pl.seed, "Sampling and solver seed")->capture_default_str();
  p->add_option("--n-gamma", pl.n_gamma, "Pitches per sampled position")->capture_default_str();
  p->add_option("--sample-gamma-min", pl.gamma_min, "Lowest sampled pitch (rad)")->capture_default_str();
  p->add_option("--sample-gamma-max", pl.gamma_max, "Highest sampled pitch (rad)")->capture_default_str();
  p->add_option("--n-slice", pl.n_slice, "Altitude grid size")->capture_default_str();
  p->add_option("--resolution", pl.resolution, "Meshing cell size (m), 0 for d_max/48")->capture_default_str();
  p->add_flag("--exact", pl.exact, "Held-Karp instead of the local-search heuristic (small instances)");
  p->add_option("--out", pl.out, "Tour JSON path")->capture_default_str();
  p->add_option("--export-meshes", pl.mesh_dir, "Directory for one OBJ per visibility volume");
  p->add_flag("--export-polyline", pl.polyline, "Add sampled leg polylines to the tour JSON");
  p->add_option("--polyline-step", pl.polyline_step, "Polyline spacing (m), default rho_min/10");
  p->add_option("--export-samples", pl.samples_out, "JSON path for the sampled configurations");

  ExperimentArgs ex;
  auto* e = app.add_subcommand("experiment", "Run a Monte-Carlo sweep and write CSV records");
  e->add_option("config", ex.config, "Experiment JSON")->required();
  e->add_option("--output", ex.output, "CSV path, overrides the config");
  e->add_flag("--resume", ex.resume, "Keep existing records and skip their trials");
  e->add_flag("--quiet", ex.quiet, "No per-trial progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*p) return cmd_plan(pl);
    if (*e) return cmd_experiment(ex);
  } catch (const ValidationError& err) {
    return report(("invalid input [" + err.constraint() + "]").c_str(), err.what(), kValidation);
  } catch (const InfeasibleError& err) {
    return report("infeasible", err.what(), kInfeasible);
  } catch (const GeometryError& err) {
    return report("infeasible geometry", err.what(), kInfeasible);
  } catch (const IoError& err) {
    return report("i/o", err.what(), kIo);
  } catch (const std::filesystem::filesystem_error& err) {
    return report("i/o", err.what(), kIo);
  } catch (const std::exception& err) {
    return report("error", err.what(), kFailure);
  }
  return kFailure;
}
