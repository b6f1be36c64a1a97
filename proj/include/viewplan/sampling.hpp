#pragma once

#include "viewplan/dubins.hpp"
#include "viewplan/geom.hpp"
#include "viewplan/random.hpp"
#include "viewplan/visibility.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace viewplan::sampling {

struct SamplingParams {
  int n_pts = 8;      ///< positions per volume
  int n_psi = 8;      ///< headings per position
  int n_gamma = 1;    ///< pitches per position
  int n_slice = 20;   ///< altitude slices for the global grid and the z* search
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  std::uint64_t seed = 1;

  /// Counts >= 1, n_slice >= 2, gamma_min <= gamma_max. Throws ValidationError.
  void validate() const;
};

/// Candidate configurations for one target.
struct Cluster {
  std::size_t target = 0;
  std::vector<dubins::Configuration> configs;
};

using ClusterSamples = std::vector<Cluster>;

/// Relative offset applied to slice altitudes at the ends of a range, keeping them inside the body.
inline constexpr double kSliceOffset = 1e-6;

/// Pitch k of n: gamma_min + k (gamma_max - gamma_min) / max(n - 1, 1).
double pitch_value(int k, const SamplingParams& params);

/// Heading j of n across the inward half-turn starting at the boundary tangent.
double inward_heading(double tangent, int j, int n_psi);

/// Largest-remainder apportionment of `total` over `weights`. When total >= weights.size(),
/// every entry receives at least one. Zero total weight splits evenly. Sums to `total`.
std::vector<int> apportion(std::span<const double> weights, int total);

/// Altitude maximizing the summed cross-section area over `n_slice` altitudes spanning the
/// range shared by all volumes. Altitudes where some volume has no cross-section are skipped.
/// Throws InfeasibleError when the volumes share no altitude.
double optimized_altitude(std::span<const geom::TriMesh> volumes, int n_slice);

/// Positions directly over each target at altitude z, headings 2 pi j / n_psi, zero pitch.
ClusterSamples sample_overhead(std::span<const visibility::Target> targets, double z, int n_psi);

/// `n_pts` points spread evenly along the slice of `volume` at z, each with `n_psi` headings
/// from the boundary tangent through the inward normal, zero pitch.
/// Throws GeometryError for an empty slice.
Cluster sample_entry_pose(const geom::TriMesh& volume, double z, int n_pts, int n_psi);
ClusterSamples sample_entry_poses(std::span<const geom::TriMesh> volumes, double z, int n_pts, int n_psi);

/// Points drawn on mesh faces with probability proportional to area, then headings
/// 2 pi j / n_psi and evenly spaced pitches. Throws GeometryError for a zero-area mesh.
ClusterSamples sample_random_face(std::span<const geom::TriMesh> volumes, const SamplingParams& params);

/// Face indices drawn with probability proportional to `areas`, with replacement.
std::vector<Eigen::Index> draw_faces(const Eigen::VectorXd& areas, int count, Rng& rng);

/// Points along the slice at each volume's lowest altitude with inward headings.
ClusterSamples sample_edge_3d(std::span<const geom::TriMesh> volumes, const SamplingParams& params);

/// Altitude and point count for one slice of one volume.
struct SliceShare {
  double z = 0.0;
  int points = 0;
};

/// Slice plan of the global weighted scheme: per volume, the grid altitudes inside it (or
/// its bottom and top when none are) with points apportioned by the summed perimeter of
/// all volumes at that altitude.
std::vector<std::vector<SliceShare>> global_slice_plan(std::span<const geom::TriMesh> volumes,
                                                       const SamplingParams& params);

ClusterSamples sample_global_weighted_face(std::span<const geom::TriMesh> volumes, const SamplingParams& params);

}  // namespace viewplan::sampling
