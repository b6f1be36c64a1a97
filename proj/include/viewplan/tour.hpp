#pragma once

#include "viewplan/dubins.hpp"
#include "viewplan/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace viewplan::tour {

/// How edge costs between sampled configurations are computed.
enum class CostMode {
  Exact3D,            ///< length of the decoupled 3D Dubins airplane path
  ModifiedEuclidean,  ///< climb-limited straight-line lower bound, positions only
  Planar2D,           ///< planar Dubins length at the minimum turn radius
};

/// Lower bound on the 3D Dubins length: the straight-line distance, stretched when the
/// altitude change needs a shallower pitch than the straight line.
double modified_euclidean(const dubins::Configuration& from, const dubins::Configuration& to,
                          const dubins::VehicleParams& params);

/// Cost between two configurations in the given mode.
double edge_cost(const dubins::Configuration& from, const dubins::Configuration& to, CostMode mode,
                 const dubins::VehicleParams& params);

inline constexpr double kNoEdge = std::numeric_limits<double>::infinity();

/// Clustered instance: one cluster of candidate configurations per target, flattened into
/// a vertex list with a full asymmetric cost matrix. Pairs inside a cluster and the
/// diagonal hold kNoEdge.
struct ClusterGraph {
  std::vector<dubins::Configuration> vertices;
  std::vector<int> cluster_of;              ///< cluster index per vertex
  std::vector<std::vector<int>> members;    ///< vertex ids per cluster, in cycle order
  std::vector<std::size_t> targets;         ///< target index per cluster
  Eigen::MatrixXd cost;
  CostMode mode = CostMode::Exact3D;

  std::size_t num_clusters() const { return members.size(); }
  std::size_t num_vertices() const { return vertices.size(); }
};

/// Fills the cost matrix in parallel. Throws ValidationError for fewer than two clusters
/// or an empty cluster.
ClusterGraph build_graph(const sampling::ClusterSamples& samples, CostMode mode, const dubins::VehicleParams& params);

/// Asymmetric TSP matrix from the Noon-Bean transformation. Forbidden arcs hold kForbidden.
struct AtspInstance {
  Eigen::MatrixXd cost;
  double penalty = 0.0;  ///< added to every inter-cluster arc
};

/// Large finite stand-in for a missing arc inside ATSP matrices.
inline constexpr double kForbidden = 1e15;

AtspInstance noon_bean(const Eigen::MatrixXd& cost, const std::vector<std::vector<int>>& clusters);
AtspInstance noon_bean(const ClusterGraph& graph);

enum class SolveMode { Exact, Heuristic };

/// Largest instance accepted by the exact solver.
inline constexpr int kMaxExactVertices = 16;

/// Cost of the closed cycle visiting `order`.
double cycle_cost(const Eigen::MatrixXd& cost, const std::vector<int>& order);

/// Hamiltonian cycle through all vertices, starting at vertex 0 in exact mode.
/// Exact: Held-Karp dynamic program (throws ValidationError above kMaxExactVertices).
/// Heuristic: nearest neighbour from `restarts` seeded start vertices, each improved with
/// Or-opt and direction-aware 2-opt to a local optimum; the cheapest is returned.
std::vector<int> solve_atsp(const Eigen::MatrixXd& cost, SolveMode mode, std::uint64_t seed, int restarts = 8);

/// One vertex per cluster in visiting order, read from a Noon-Bean tour: each cluster is
/// represented by the successor (in its cycle) of the vertex from which the tour leaves it.
/// Throws std::logic_error when a cluster is not visited as one contiguous block.
std::vector<int> decode_noon_bean(const std::vector<int>& order, const std::vector<std::vector<int>>& clusters);

/// Cost of the cycle through the chosen vertices.
double selection_cost(const Eigen::MatrixXd& cost, const std::vector<int>& selection);

/// Best vertex per cluster for a fixed cyclic cluster order (exact dynamic program).
std::vector<int> best_selection(const Eigen::MatrixXd& cost, const std::vector<std::vector<int>>& clusters,
                                const std::vector<int>& cluster_order);

/// Noon-Bean transformation, ATSP solve and decoding. Heuristic mode also alternates
/// exact vertex selection with cluster-order moves on each restart's result.
std::vector<int> solve_gtsp(const ClusterGraph& graph, SolveMode mode, std::uint64_t seed, int restarts = 8);

/// One flown leg: planar at a fixed altitude, or a full 3D path.
struct Leg {
  std::variant<dubins::DubinsPath2, dubins::DubinsPath3> path;
  double altitude = 0.0;  ///< planar legs only

  double length() const;
  std::vector<dubins::Configuration> sample(double ds) const;
};

enum class LegModel { Planar, Dubins3D };

/// Closed tour, one configuration per target, leg i joining configs[i] to configs[i+1].
struct Tour {
  std::vector<dubins::Configuration> configs;
  std::vector<std::size_t> targets;
  std::vector<Leg> legs;
  double length = 0.0;
  double normalized_cost = 0.0;  ///< length / rho_min
};

/// Stitches legs between consecutive configurations (and back to the first).
Tour make_tour(const std::vector<dubins::Configuration>& configs, const std::vector<std::size_t>& targets,
               const dubins::VehicleParams& params, LegModel model);

/// Tour from a Noon-Bean ATSP order over the graph's vertices.
Tour extract_tour(const std::vector<int>& atsp_order, const ClusterGraph& graph, const dubins::VehicleParams& params,
                  LegModel model);

/// Throws ValidationError unless every target in [0, num_targets) is visited exactly once.
void check_tour(const Tour& tour, std::size_t num_targets);

/// Headings and pitches for an ordered closed sequence of positions (rows): the direction
/// of next minus previous position, with pitch clipped to the vehicle limits. Consecutive
/// positions closer than 4 rho_min are then both pointed along their connecting segment.
std::vector<dubins::Configuration> bisect_angle_approx(const Eigen::MatrixX3d& positions,
                                                       const dubins::VehicleParams& params);

/// Sampled-configuration DTSPN: graph in `mode`, GTSP solve, legs re-planned (planar legs
/// for Planar2D, 3D otherwise).
Tour plan_dtspn(const sampling::ClusterSamples& samples, CostMode mode, const dubins::VehicleParams& params,
                SolveMode solve = SolveMode::Heuristic, std::uint64_t seed = 1);

/// Position-only tour with the climb-limited lower-bound metric, then angles assigned from
/// the visiting order and legs stitched with 3D Dubins paths.
Tour plan_metspn(const sampling::ClusterSamples& samples, const dubins::VehicleParams& params,
                 SolveMode solve = SolveMode::Heuristic, std::uint64_t seed = 1);

/// Positions of each cluster with duplicates removed (angles dropped).
sampling::ClusterSamples unique_positions(const sampling::ClusterSamples& samples);

}  // namespace viewplan::tour
