#include "viewplan/sampling.hpp"

#include "viewplan/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace viewplan::sampling {

namespace {

/// Configurations at each perimeter sample of `loops` (at altitude z), headings across the
/// inward half-turn and pitches from the parameters.
void append_boundary_configs(const std::vector<Polygon2>& loops, double z, int count, int n_psi, int n_gamma,
                             const SamplingParams& pitch_params, std::vector<dubins::Configuration>& out) {
  if (count <= 0) return;
  for (const auto& s : geom::perimeter_samples(loops, static_cast<std::size_t>(count)))
    for (int j = 0; j < n_psi; ++j)
      for (int k = 0; k < n_gamma; ++k)
        out.emplace_back(s.point.x(), s.point.y(), z, inward_heading(s.tangent, j, n_psi), pitch_value(k, pitch_params));
}

std::pair<double, double> global_extent(std::span<const geom::TriMesh> volumes) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : volumes) {
    const auto [a, b] = geom::mesh_z_extent(v);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

/// Altitude just inside the volume from `edge` toward `edge + span` with a nonempty cross
/// section; the offset grows when the mesh tapers to a point.
double inside_slice(const geom::TriMesh& mesh, double edge, double span) {
  for (double f = kSliceOffset; f < 0.5; f *= 10.0)
    if (!geom::slice_mesh(mesh, edge + f * span).empty()) return edge + f * span;
  return edge + 0.5 * span;
}

}  // namespace

void SamplingParams::validate() const {
  if (n_pts < 1 || n_psi < 1 || n_gamma < 1)
    throw ValidationError("sample counts", "n_pts, n_psi and n_gamma must be at least 1");
  if (n_slice < 2) throw ValidationError("sample counts", "n_slice must be at least 2");
  if (!(gamma_min <= gamma_max)) throw ValidationError("pitch range", "sampling pitch range is empty");
}

double pitch_value(int k, const SamplingParams& params) {
  return params.gamma_min + k * (params.gamma_max - params.gamma_min) / std::max(params.n_gamma - 1, 1);
}

double inward_heading(double tangent, int j, int n_psi) {
  return wrap_2pi(tangent + j * kPi / std::max(n_psi - 1, 1));
}

std::vector<int> apportion(std::span<const double> weights, int total) {
  const int n = static_cast<int>(weights.size());
  std::vector<int> out(weights.size(), 0);
  if (n == 0 || total <= 0) return out;
  double sum = 0.0;
  for (double w : weights) sum += std::max(w, 0.0);
  std::vector<double> share(weights.size());
  for (int i = 0; i < n; ++i)
    share[i] = sum > 0.0 ? total * std::max(weights[i], 0.0) / sum : static_cast<double>(total) / n;
  int given = 0;
  std::vector<int> order(weights.size());
  for (int i = 0; i < n; ++i) {
    out[i] = static_cast<int>(std::floor(share[i]));
    given += out[i];
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
  });
  for (int r = 0; r < total - given; ++r) out[order[static_cast<std::size_t>(r % n)]] += 1;
  // one point each when there are enough, taken from the largest allocations
  if (total >= n)
    for (int i = 0; i < n; ++i) {
      if (out[i] > 0) continue;
      const auto donor = std::max_element(out.begin(), out.end());
      --*donor;
      out[i] = 1;
    }
  return out;
}

double optimized_altitude(std::span<const geom::TriMesh> volumes, int n_slice) {
  if (volumes.empty()) throw GeometryError("optimized_altitude: no volumes");
  if (n_slice < 2) throw ValidationError("sample counts", "n_slice must be at least 2");
  double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : volumes) {
    const auto [a, b] = geom::mesh_z_extent(v);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  if (!(lo < hi))
    throw InfeasibleError("common altitude: the visibility volumes share no altitude, a constant-altitude tour is impossible");
  const double eps = kSliceOffset * (hi - lo);
  lo += eps;
  hi -= eps;

  double best_z = 0.0, best_area = -1.0;
  for (int s = 0; s < n_slice; ++s) {
    const double z = lo + (hi - lo) * s / (n_slice - 1);
    double area = 0.0;
    bool all = true;
    for (const auto& v : volumes) {
      const auto loops = geom::slice_mesh(v, z);
      if (loops.empty()) {
        all = false;
        break;
      }
      for (const auto& p : loops) area += geom::polygon_area(p);
    }
    if (all && area > best_area) {
      best_area = area;
      best_z = z;
    }
  }
  if (best_area < 0.0)
    throw InfeasibleError("common altitude: no sampled altitude cuts every visibility volume");
  return best_z;
}

ClusterSamples sample_overhead(std::span<const visibility::Target> targets, double z, int n_psi) {
  if (n_psi < 1) throw ValidationError("sample counts", "n_psi must be at least 1");
  ClusterSamples out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out[i].target = i;
    const Point3& p = targets[i].position;
    for (int j = 0; j < n_psi; ++j) out[i].configs.emplace_back(p.x(), p.y(), z, kTwoPi * j / n_psi, 0.0);
  }
  return out;
}

Cluster sample_entry_pose(const geom::TriMesh& volume, double z, int n_pts, int n_psi) {
  if (n_pts < 1 || n_psi < 1) throw ValidationError("sample counts", "n_pts and n_psi must be at least 1");
  const auto loops = geom::slice_mesh(volume, z);
  if (loops.empty()) throw GeometryError("sample_entry_pose: the volume has no cross-section at z = " + std::to_string(z));
  Cluster c;
  SamplingParams level;
  append_boundary_configs(loops, z, n_pts, n_psi, 1, level, c.configs);
  return c;
}

ClusterSamples sample_entry_poses(std::span<const geom::TriMesh> volumes, double z, int n_pts, int n_psi) {
  ClusterSamples out(volumes.size());
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    out[i] = sample_entry_pose(volumes[i], z, n_pts, n_psi);
    out[i].target = i;
  }
  return out;
}

std::vector<Eigen::Index> draw_faces(const Eigen::VectorXd& areas, int count, Rng& rng) {
  std::vector<double> cumulative(static_cast<std::size_t>(areas.size()));
  double total = 0.0;
  for (Eigen::Index f = 0; f < areas.size(); ++f) cumulative[static_cast<std::size_t>(f)] = total += areas(f);
  if (!(total > 0.0)) throw GeometryError("random face sampling: mesh has zero surface area");
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    // skip zero-area faces that share the cumulative value of their predecessor
    while (areas(it - cumulative.begin()) <= 0.0 && it + 1 != cumulative.end()) ++it;
    out.push_back(it - cumulative.begin());
  }
  return out;
}

ClusterSamples sample_random_face(std::span<const geom::TriMesh> volumes, const SamplingParams& params) {
  params.validate();
  ClusterSamples out(volumes.size());
  parallel_for(volumes.size(), [&](std::size_t i) {
    const geom::TriMesh& mesh = volumes[i];
    Rng rng(params.seed, i);
    const auto faces = draw_faces(geom::element_areas(mesh), params.n_pts, rng);
    Cluster& c = out[i];
    c.target = i;
    for (Eigen::Index f : faces) {
      const double r0 = std::sqrt(rng.uniform()), r1 = rng.uniform();
      const Point3 s = mesh.corner(f, 0) * (1.0 - r0) + mesh.corner(f, 1) * r0 * (1.0 - r1) + mesh.corner(f, 2) * r0 * r1;
      for (int j = 0; j < params.n_psi; ++j)
        for (int k = 0; k < params.n_gamma; ++k)
          c.configs.emplace_back(s, kTwoPi * j / params.n_psi, pitch_value(k, params));
    }
  });
  return out;
}

ClusterSamples sample_edge_3d(std::span<const geom::TriMesh> volumes, const SamplingParams& params) {
  params.validate();
  ClusterSamples out(volumes.size());
  parallel_for(volumes.size(), [&](std::size_t i) {
    const auto [lo, hi] = geom::mesh_z_extent(volumes[i]);
    const double z = lo + kSliceOffset * (hi - lo);
    const auto loops = geom::slice_mesh(volumes[i], z);
    if (loops.empty()) throw GeometryError("3D edge sampling: empty slice at the lowest altitude of volume " + std::to_string(i));
    out[i].target = i;
    append_boundary_configs(loops, z, params.n_pts, params.n_psi, params.n_gamma, params, out[i].configs);
  });
  return out;
}

std::vector<std::vector<SliceShare>> global_slice_plan(std::span<const geom::TriMesh> volumes,
                                                       const SamplingParams& params) {
  params.validate();
  if (volumes.empty()) return {};
  const auto [zeta_lo, zeta_hi] = global_extent(volumes);
  const int n = params.n_slice;
  const double step = (zeta_hi - zeta_lo) / (n - 1);
  auto grid = [&](int s) { return zeta_lo + step * s; };

  std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < n; ++s)
    for (const auto& v : volumes) mu[static_cast<std::size_t>(s)] += geom::slice_perimeter(v, grid(s));

  auto mu_at = [&](double z) {
    if (step <= 0.0) return mu[0];
    const double u = std::clamp((z - zeta_lo) / step, 0.0, static_cast<double>(n - 1));
    const int s = std::min(static_cast<int>(u), n - 2);
    const double f = u - s;
    return (1.0 - f) * mu[static_cast<std::size_t>(s)] + f * mu[static_cast<std::size_t>(s) + 1];
  };

  std::vector<std::vector<SliceShare>> plan(volumes.size());
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const auto [lo, hi] = geom::mesh_z_extent(volumes[i]);
    std::vector<double> zs, weights;
    for (int s = 0; s < n; ++s) {
      const double z = grid(s);
      if (z > lo && z < hi && !geom::slice_mesh(volumes[i], z).empty()) {
        zs.push_back(z);
        weights.push_back(mu[static_cast<std::size_t>(s)]);
      }
    }
    if (zs.empty()) {
      for (double z : {inside_slice(volumes[i], lo, hi - lo), inside_slice(volumes[i], hi, lo - hi)}) {
        zs.push_back(z);
        weights.push_back(mu_at(z));
      }
    }
    const auto counts = apportion(weights, params.n_pts);
    for (std::size_t r = 0; r < zs.size(); ++r) plan[i].push_back({zs[r], counts[r]});
  }
  return plan;
}

ClusterSamples sample_global_weighted_face(std::span<const geom::TriMesh> volumes, const SamplingParams& params) {
  const auto plan = global_slice_plan(volumes, params);
  ClusterSamples out(volumes.size());
  parallel_for(volumes.size(), [&](std::size_t i) {
    out[i].target = i;
    for (const auto& share : plan[i]) {
      if (share.points == 0) continue;
      const auto loops = geom::slice_mesh(volumes[i], share.z);
      if (loops.empty()) continue;
      append_boundary_configs(loops, share.z, share.points, params.n_psi, params.n_gamma, params, out[i].configs);
    }
    if (out[i].configs.empty())
      throw GeometryError("global weighted sampling: no cross-section found for volume " + std::to_string(i));
  });
  return out;
}

}  // namespace viewplan::sampling
