#pragma once

#include "viewplan/dubins.hpp"
#include "viewplan/sampling.hpp"
#include "viewplan/tour.hpp"
#include "viewplan/visibility.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace viewplan::scenario {

/// Relative frequency of each target class.
struct PlacementWeights {
  double ground = 1.0;
  double wall = 1.0;
  double roof = 1.0;
};

/// Synthetic city and target parameters.
struct ScenarioParams {
  double region_width = 2400.0;  ///< east extent (m)
  double region_depth = 2400.0;  ///< north extent (m)
  int num_objects = 12;
  double footprint_min = 40.0;   ///< building side length range (m)
  double footprint_max = 120.0;
  double street_gap = 10.0;      ///< minimum clearance between footprints (m)
  double height_min = 30.0;      ///< building heights drawn uniformly, then capped
  double height_max = 150.0;
  double height_cap = 150.0;
  int num_targets = 5;
  PlacementWeights placement;
  visibility::SensorParams sensor;
  dubins::VehicleParams vehicle;
  std::uint64_t seed = 1;

  double separation() const { return 2.0 * sensor.d_max; }
  /// Tallest height the generator can produce.
  double height_bound() const { return std::min(height_max, height_cap); }

  /// Checks counts and ranges, then the scene constraints evaluated at the worst-case
  /// building height. `planar` also requires a common altitude for constant-altitude tours.
  /// Throws ValidationError naming the violated constraint.
  void validate(bool planar = false) const;
};

/// Everything a planner needs: airspace, buildings, targets and platform parameters.
struct Scene {
  visibility::Environment env;
  std::vector<visibility::Target> targets;
  visibility::SensorParams sensor;
  dubins::VehicleParams vehicle;
};

/// Checks the environment, every target's placement class, and the joint constraints:
/// airspace clearance (z_min > h_max + 2 rho_min), viewing altitude band
/// (z_min <= h_view + h_max <= z_max), viewing range (z_min <= d_max) and target
/// separation (pairwise distance > 2 d_max). With `planar`, also the common altitude
/// condition h_max + h_view <= d_max. Throws ValidationError naming the constraint.
void validate_scene(const Scene& scene, bool planar = false);

/// Rectangular region with non-overlapping axis-aligned buildings, z_min just above the
/// clearance bound and z_max = h_max + d_max. Deterministic per seed.
visibility::Environment generate_city(const ScenarioParams& params);

/// Targets drawn by class weight with pairwise separation above 2 d_max and a small set of
/// probe viewpoints confirming each target can be seen. Deterministic per seed.
std::vector<visibility::Target> place_targets(const visibility::Environment& env, const ScenarioParams& params);

/// generate_city + place_targets + validate_scene.
Scene generate_scene(const ScenarioParams& params, bool planar = false);

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

enum class Method {
  OverheadDtsp,   ///< 2D, fly over each target at z*
  EntryPose2D,    ///< 2D, entry poses on z* cross-sections
  Dtspn3D,        ///< 3D samples, exact 3D Dubins edge costs
  Metspn3D,       ///< 3D samples, lower-bound metric then angle assignment
};

enum class Strategy { RandomFace, Edge3D, GlobalWeightedFace };

/// Parsed algorithm identifier such as "3D-DTSPN-RFAC-8-32" (headings, then points).
struct AlgorithmId {
  Method method = Method::Dtspn3D;
  Strategy strategy = Strategy::RandomFace;
  int n_psi = 8;
  int n_pts = 1;

  std::string to_string() const;
  /// Identifier without the trailing counts, e.g. "3D-DTSPN-RFAC" or "2D-DTSP".
  std::string family() const;
};

/// Accepts 2D-DTSP-k, 2D-DTSPN-ETRY-npsi-npts, 3D-DTSPN-{RFAC|E3D|GWF}-npsi-npts and
/// 3D-METSPN-{RFAC|E3D|GWF}-npsi-npts. Throws ValidationError otherwise.
AlgorithmId parse_algorithm(const std::string& id);

/// Combines a family ("3D-METSPN-GWF") with counts.
AlgorithmId make_algorithm(const std::string& family, int n_psi, int n_pts);

struct PlanOptions {
  int n_gamma = 1;
  double gamma_min = 0.0;  ///< sampled pitch range
  double gamma_max = 0.0;
  int n_slice = 20;
  std::uint64_t seed = 1;
  tour::SolveMode solve = tour::SolveMode::Heuristic;
};

struct PlanResult {
  tour::Tour tour;
  sampling::ClusterSamples samples;
  std::optional<double> altitude;  ///< z* for the constant-altitude methods
  double seconds = 0.0;            ///< sampling + solving, volumes excluded
};

/// Runs one algorithm on prebuilt visibility volumes (one per scene target).
PlanResult plan(const Scene& scene, const std::vector<geom::TriMesh>& volumes, const AlgorithmId& alg,
                const PlanOptions& options = {});

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct TrialRecord {
  std::uint64_t seed = 0;
  int num_targets = 0;
  std::string algorithm;
  int n_pts = 0;
  int n_psi = 0;
  int n_gamma = 1;
  double length = 0.0;
  double normalized_cost = 0.0;
  double wall_clock = 0.0;
  std::string status = "ok";  ///< "ok" or "error:<constraint or reason>"

  /// Identity of the trial for resuming.
  std::string key() const;
};

struct ExperimentConfig {
  std::vector<int> target_counts{3, 5};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> algorithms{"3D-DTSPN-RFAC", "3D-METSPN-RFAC"};
  std::vector<int> n_pts{2, 8, 32};
  std::vector<int> n_psi{4, 8};
  int n_gamma = 1;
  int n_slice = 20;
  double resolution = 0.0;  ///< meshing cell size, 0 for d_max / 48
  ScenarioParams scenario;
  std::string output;       ///< CSV path; empty keeps records in memory only
  bool resume = false;
};

inline constexpr const char* kCsvHeader =
    "seed,M,algorithm,n_pts,n_psi,n_gamma,length_m,normalized_cost,wall_clock_s,status";

std::string to_csv_row(const TrialRecord& r);
TrialRecord parse_csv_row(const std::string& line);
std::vector<TrialRecord> read_csv(const std::string& path);

/// Every (target count, seed) scene crossed with every algorithm and count combination.
/// Constant-altitude overhead tours ignore n_pts and are run once per heading count.
/// 3D DTSPN and METSPN trials with the same strategy and counts draw identical samples.
/// Failures are recorded with an error status and the sweep continues. With `resume`,
/// records already present in the output CSV are kept and skipped.
/// The optional callback sees each finished trial and its tour (absent on failure).
std::vector<TrialRecord> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const TrialRecord&, const tour::Tour*)>& on_trial = {});

/// Seed for a trial's random streams, derived from the sweep seed and the trial identity.
std::uint64_t trial_seed(std::uint64_t scene_seed, const std::string& key);

}  // namespace viewplan::scenario
