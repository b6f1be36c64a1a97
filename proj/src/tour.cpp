#include "viewplan/tour.hpp"

#include "viewplan/parallel.hpp"
#include "viewplan/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace viewplan::tour {

using dubins::Configuration;

double modified_euclidean(const Configuration& from, const Configuration& to, const dubins::VehicleParams& params) {
  const double dz = to.z - from.z;
  const double limit = dz > 0.0 ? params.gamma_max : params.gamma_min;
  const double s = std::abs(std::sin(limit));
  if (s == 0.0) throw ValidationError("pitch limits", "pitch limit of zero makes altitude changes impossible");
  return std::max(std::abs(dz) / s, (to.position() - from.position()).norm());
}

double edge_cost(const Configuration& from, const Configuration& to, CostMode mode,
                 const dubins::VehicleParams& params) {
  switch (mode) {
    case CostMode::Exact3D: return dubins::plan_3d(from, to, params).length();
    case CostMode::ModifiedEuclidean: return modified_euclidean(from, to, params);
    case CostMode::Planar2D:
      return dubins::plan_2d({from.x, from.y, from.psi}, {to.x, to.y, to.psi}, params.rho_min).length();
  }
  return kNoEdge;
}

ClusterGraph build_graph(const sampling::ClusterSamples& samples, CostMode mode, const dubins::VehicleParams& params) {
  if (samples.size() < 2) throw ValidationError("cluster count", "a tour needs at least two clusters");
  ClusterGraph g;
  g.mode = mode;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].configs.empty())
      throw ValidationError("cluster count", "cluster " + std::to_string(k) + " has no configurations");
    g.targets.push_back(samples[k].target);
    auto& ids = g.members.emplace_back();
    for (const auto& q : samples[k].configs) {
      ids.push_back(static_cast<int>(g.vertices.size()));
      g.vertices.push_back(q);
      g.cluster_of.push_back(static_cast<int>(k));
    }
  }
  const auto n = static_cast<Eigen::Index>(g.vertices.size());
  g.cost.setConstant(n, n, kNoEdge);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto u = static_cast<Eigen::Index>(row);
    for (Eigen::Index v = 0; v < n; ++v)
      if (g.cluster_of[row] != g.cluster_of[static_cast<std::size_t>(v)])
        g.cost(u, v) = edge_cost(g.vertices[row], g.vertices[static_cast<std::size_t>(v)], mode, params);
  });
  return g;
}

AtspInstance noon_bean(const Eigen::MatrixXd& cost, const std::vector<std::vector<int>>& clusters) {
  const Eigen::Index n = cost.rows();
  std::vector<int> cluster_of(static_cast<std::size_t>(n), -1), pred(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    for (std::size_t i = 0; i < c.size(); ++i) {
      cluster_of[static_cast<std::size_t>(c[i])] = static_cast<int>(k);
      pred[static_cast<std::size_t>(c[i])] = c[(i + c.size() - 1) % c.size()];
    }
  }
  for (int k : cluster_of)
    if (k < 0) throw ValidationError("cluster count", "every vertex must belong to a cluster");

  double total = 0.0;
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      if (cluster_of[static_cast<std::size_t>(u)] != cluster_of[static_cast<std::size_t>(v)] && std::isfinite(cost(u, v)))
        total += cost(u, v);

  AtspInstance out;
  out.penalty = total + 1.0;
  out.cost.setConstant(n, n, kForbidden);
  for (const auto& c : clusters)
    if (c.size() >= 2)
      for (std::size_t i = 0; i < c.size(); ++i) out.cost(c[i], c[(i + 1) % c.size()]) = 0.0;
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      if (cluster_of[static_cast<std::size_t>(u)] != cluster_of[static_cast<std::size_t>(v)] && std::isfinite(cost(u, v)))
        out.cost(pred[static_cast<std::size_t>(u)], v) = cost(u, v) + out.penalty;
  return out;
}

AtspInstance noon_bean(const ClusterGraph& graph) { return noon_bean(graph.cost, graph.members); }

double cycle_cost(const Eigen::MatrixXd& cost, const std::vector<int>& order) {
  double s = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) s += cost(order[i], order[(i + 1) % order.size()]);
  return s;
}

namespace {

/// Path cost with forbidden arcs counted apart from the finite sum, so that huge sentinels
/// never swamp the precision of real costs.
struct Amount {
  long forbidden = 0;
  double sum = 0.0;

  Amount operator+(const Amount& o) const { return {forbidden + o.forbidden, sum + o.sum}; }
  Amount operator-(const Amount& o) const { return {forbidden - o.forbidden, sum - o.sum}; }
  bool better_than(const Amount& o) const {
    if (forbidden != o.forbidden) return forbidden < o.forbidden;
    return sum < o.sum - 1e-9 * (1.0 + std::abs(o.sum));
  }
};

class LocalSearch {
 public:
  explicit LocalSearch(const Eigen::MatrixXd& cost) : cost_(cost), n_(static_cast<int>(cost.rows())) {}

  Amount arc(int u, int v) const {
    const double c = cost_(u, v);
    if (!(c < 0.5 * kForbidden)) return {1, 0.0};
    return {0, c};
  }

  std::vector<int> nearest_neighbour(int start) const {
    std::vector<int> tour{start};
    std::vector<char> used(static_cast<std::size_t>(n_), 0);
    used[static_cast<std::size_t>(start)] = 1;
    for (int step = 1; step < n_; ++step) {
      const int u = tour.back();
      int best = -1;
      Amount best_cost;
      for (int v = 0; v < n_; ++v) {
        if (used[static_cast<std::size_t>(v)]) continue;
        const Amount a = arc(u, v);
        if (best < 0 || a.better_than(best_cost)) best = v, best_cost = a;
      }
      used[static_cast<std::size_t>(best)] = 1;
      tour.push_back(best);
    }
    return tour;
  }

  void improve(std::vector<int>& t) const {
    if (n_ < 4) return;
    for (bool again = true; again;) {
      again = or_opt(t);
      again = two_opt(t) || again;
    }
  }

  /// Iterated local search: random double-bridge kicks, each followed by improve(), keeping
  /// the result only when it is cheaper.
  void kick(std::vector<int>& t, Rng& rng, int rounds) const {
    if (n_ < 8) return;
    Amount best = total(t);
    for (int r = 0; r < rounds; ++r) {
      std::array<int, 3> cut{};
      for (auto& c : cut) c = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_ - 1)));
      std::sort(cut.begin(), cut.end());
      if (cut[0] == cut[1] || cut[1] == cut[2]) continue;
      std::vector<int> cand(t.begin(), t.begin() + cut[0]);
      cand.insert(cand.end(), t.begin() + cut[1], t.begin() + cut[2]);
      cand.insert(cand.end(), t.begin() + cut[0], t.begin() + cut[1]);
      cand.insert(cand.end(), t.begin() + cut[2], t.end());
      improve(cand);
      if (const Amount c = total(cand); c.better_than(best)) best = c, t = std::move(cand);
    }
  }

  /// Kick rounds affordable for an instance of this size.
  int kick_budget() const { return std::clamp(static_cast<int>(200000 / (static_cast<long>(n_) * n_)), 0, 50); }

 private:
  Amount total(const std::vector<int>& t) const {
    Amount a;
    for (int k = 0; k < n_; ++k) a = a + arc(t[static_cast<std::size_t>(k)], t[static_cast<std::size_t>((k + 1) % n_)]);
    return a;
  }

  bool or_opt(std::vector<int>& t) const {
    bool moved = false;
    for (int len = 1; len <= 3 && len + 2 <= n_; ++len)
      for (int i = 0; i < n_; ++i) {
        const int p = t[static_cast<std::size_t>((i - 1 + n_) % n_)];
        const int f = t[static_cast<std::size_t>(i)];
        const int l = t[static_cast<std::size_t>((i + len - 1) % n_)];
        const int nx = t[static_cast<std::size_t>((i + len) % n_)];
        const Amount removal = arc(p, f) + arc(l, nx) - arc(p, nx);
        for (int k = 0; k + 1 < n_ - len; ++k) {
          const int a = t[static_cast<std::size_t>((i + len + k) % n_)];
          const int b = t[static_cast<std::size_t>((i + len + k + 1) % n_)];
          const Amount insertion = arc(a, f) + arc(l, b) - arc(a, b);
          if (!insertion.better_than(removal)) continue;
          std::vector<int> next;
          next.reserve(t.size());
          for (int m = 0; m <= k; ++m) next.push_back(t[static_cast<std::size_t>((i + len + m) % n_)]);
          for (int m = 0; m < len; ++m) next.push_back(t[static_cast<std::size_t>((i + m) % n_)]);
          for (int m = k + 1; m < n_ - len; ++m) next.push_back(t[static_cast<std::size_t>((i + len + m) % n_)]);
          t = std::move(next);
          moved = true;
          break;
        }
      }
    return moved;
  }

  bool two_opt(std::vector<int>& t) const {
    bool moved = false;
    std::vector<Amount> fwd(static_cast<std::size_t>(n_)), rev(static_cast<std::size_t>(n_));
    auto prefix = [&] {
      fwd[0] = rev[0] = {};
      for (int k = 1; k < n_; ++k) {
        const int a = t[static_cast<std::size_t>(k - 1)], b = t[static_cast<std::size_t>(k)];
        fwd[static_cast<std::size_t>(k)] = fwd[static_cast<std::size_t>(k - 1)] + arc(a, b);
        rev[static_cast<std::size_t>(k)] = rev[static_cast<std::size_t>(k - 1)] + arc(b, a);
      }
    };
    prefix();
    for (int i = 0; i + 2 < n_; ++i)
      for (int j = i + 2; j < n_; ++j) {
        if (i == 0 && j == n_ - 1) continue;
        const int a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>(i + 1)];
        const int c = t[static_cast<std::size_t>(j)], d = t[static_cast<std::size_t>((j + 1) % n_)];
        // the segment b..c is traversed backwards after the move
        const Amount before = arc(a, b) + arc(c, d) + (fwd[static_cast<std::size_t>(j)] - fwd[static_cast<std::size_t>(i + 1)]);
        const Amount after = arc(a, c) + arc(b, d) + (rev[static_cast<std::size_t>(j)] - rev[static_cast<std::size_t>(i + 1)]);
        if (!after.better_than(before)) continue;
        std::reverse(t.begin() + i + 1, t.begin() + j + 1);
        prefix();
        moved = true;
      }
    return moved;
  }

  const Eigen::MatrixXd& cost_;
  int n_;
};

std::vector<int> held_karp(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (n > kMaxExactVertices)
    throw ValidationError("exact solver size", "exact solver handles at most " + std::to_string(kMaxExactVertices) +
                                                   " vertices, got " + std::to_string(n));
  if (n <= 2) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    return order;
  }
  // subsets of vertices 1..n-1, path from 0 ending at j
  const int m = n - 1;
  const std::size_t full = std::size_t{1} << m;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full * static_cast<std::size_t>(m), inf);
  std::vector<signed char> parent(full * static_cast<std::size_t>(m), -1);
  auto at = [m](std::size_t mask, int j) { return mask * static_cast<std::size_t>(m) + static_cast<std::size_t>(j); };
  for (int j = 0; j < m; ++j) dp[at(std::size_t{1} << j, j)] = cost(0, j + 1);
  for (std::size_t mask = 1; mask < full; ++mask)
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const double base = dp[at(mask, j)];
      if (base == inf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const double c = base + cost(j + 1, k + 1);
        if (c < dp[at(next, k)]) {
          dp[at(next, k)] = c;
          parent[at(next, k)] = static_cast<signed char>(j);
        }
      }
    }
  double best = inf;
  int last = 0;
  for (int j = 0; j < m; ++j)
    if (const double c = dp[at(full - 1, j)] + cost(j + 1, 0); c < best) best = c, last = j;
  std::vector<int> order;
  std::size_t mask = full - 1;
  for (int j = last; j >= 0;) {
    order.push_back(j + 1);
    const int p = parent[at(mask, j)];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  order.push_back(0);
  std::reverse(order.begin(), order.end());
  return order;
}

int seeded_start(std::uint64_t seed, int restart, int n) {
  Rng rng(seed, static_cast<std::uint64_t>(restart));
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
}

std::vector<int> cluster_sequence(const std::vector<int>& selection, const std::vector<int>& cluster_of) {
  std::vector<int> seq;
  for (int v : selection) seq.push_back(cluster_of[static_cast<std::size_t>(v)]);
  return seq;
}

/// Alternates cluster-order moves with exact re-selection of the vertices for the current
/// order until neither helps. Small instances re-select vertices for every candidate order.
void refine_selection(const ClusterGraph& g, std::vector<int>& sel) {
  const int m = static_cast<int>(sel.size());
  std::size_t smallest = g.members.front().size(), work = 0;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    smallest = std::min(smallest, g.members[k].size());
    work += g.members[k].size() * g.members[(k + 1) % g.members.size()].size();
  }
  const bool reselect_each = smallest * work * static_cast<std::size_t>(m * m) <= 4'000'000;

  double best = selection_cost(g.cost, sel);
  auto better = [&](double c) { return c < best - 1e-9 * (1.0 + std::abs(best)); };
  auto consider = [&](std::vector<int> cand) {
    if (reselect_each) cand = best_selection(g.cost, g.members, cluster_sequence(cand, g.cluster_of));
    const double c = selection_cost(g.cost, cand);
    if (!better(c)) return false;
    best = c;
    sel = std::move(cand);
    return true;
  };
  for (bool again = true; again;) {
    again = false;
    if (m >= 3) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          std::vector<int> cand = sel;
          const int v = cand[static_cast<std::size_t>(i)];
          cand.erase(cand.begin() + i);
          cand.insert(cand.begin() + j, v);
          again = consider(std::move(cand)) || again;
        }
      for (int i = 0; i + 1 < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          std::vector<int> cand = sel;
          std::reverse(cand.begin() + i, cand.begin() + j + 1);
          again = consider(std::move(cand)) || again;
        }
    }
    std::vector<int> chosen = best_selection(g.cost, g.members, cluster_sequence(sel, g.cluster_of));
    if (const double c = selection_cost(g.cost, chosen); better(c)) best = c, sel = std::move(chosen), again = true;
  }
}

}  // namespace

std::vector<int> solve_atsp(const Eigen::MatrixXd& cost, SolveMode mode, std::uint64_t seed, int restarts) {
  const int n = static_cast<int>(cost.rows());
  if (n != cost.cols()) throw ValidationError("matrix shape", "cost matrix must be square");
  if (n < 2) throw ValidationError("matrix shape", "a tour needs at least two vertices");
  if (mode == SolveMode::Exact) return held_karp(cost);

  const LocalSearch search(cost);
  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    std::vector<int> t = search.nearest_neighbour(seeded_start(seed, r, n));
    search.improve(t);
    if (const double c = cycle_cost(cost, t); c < best_cost) best_cost = c, best = std::move(t);
  }
  Rng rng(seed, static_cast<std::uint64_t>(std::max(restarts, 1)));
  search.kick(best, rng, search.kick_budget());
  return best;
}

std::vector<int> decode_noon_bean(const std::vector<int>& order, const std::vector<std::vector<int>>& clusters) {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  std::vector<int> cluster_of(total, -1), succ(total, -1);
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (std::size_t i = 0; i < clusters[k].size(); ++i) {
      cluster_of[static_cast<std::size_t>(clusters[k][i])] = static_cast<int>(k);
      succ[static_cast<std::size_t>(clusters[k][i])] = clusters[k][(i + 1) % clusters[k].size()];
    }
  const std::size_t n = order.size();
  if (n != total) throw std::logic_error("decode_noon_bean: order does not visit every vertex once");
  if (clusters.size() == 1) return {succ[static_cast<std::size_t>(order.back())]};

  auto cl = [&](std::size_t pos) { return cluster_of[static_cast<std::size_t>(order[pos % n])]; };
  std::size_t start = 0;
  while (start < n && cl(start + n - 1) == cl(start)) ++start;

  std::vector<int> selection;
  std::vector<char> seen(clusters.size(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pos = start + k;
    if (cl(pos) != cl(pos + 1)) {
      const int c = cl(pos);
      if (seen[static_cast<std::size_t>(c)]) throw std::logic_error("decode_noon_bean: a cluster is visited in more than one block");
      seen[static_cast<std::size_t>(c)] = 1;
      selection.push_back(succ[static_cast<std::size_t>(order[pos % n])]);
    }
  }
  if (selection.size() != clusters.size()) throw std::logic_error("decode_noon_bean: a cluster is missing from the tour");
  return selection;
}

double selection_cost(const Eigen::MatrixXd& cost, const std::vector<int>& selection) {
  if (selection.size() < 2) return 0.0;
  return cycle_cost(cost, selection);
}

std::vector<int> best_selection(const Eigen::MatrixXd& cost, const std::vector<std::vector<int>>& clusters,
                                const std::vector<int>& cluster_order) {
  const std::size_t m = cluster_order.size();
  if (m == 0) return {};
  if (m == 1) return {clusters[static_cast<std::size_t>(cluster_order[0])].front()};
  // anchor the cycle at the smallest cluster
  std::size_t anchor = 0;
  for (std::size_t k = 1; k < m; ++k)
    if (clusters[static_cast<std::size_t>(cluster_order[k])].size() <
        clusters[static_cast<std::size_t>(cluster_order[anchor])].size())
      anchor = k;
  auto layer = [&](std::size_t k) -> const std::vector<int>& {
    return clusters[static_cast<std::size_t>(cluster_order[(anchor + k) % m])];
  };

  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  std::vector<int> best_path;
  std::vector<std::vector<int>> parent(m);
  for (int s : layer(0)) {
    std::vector<double> dist;
    for (int v : layer(1)) dist.push_back(cost(s, v));
    for (std::size_t k = 2; k < m; ++k) {
      const auto& prev = layer(k - 1);
      const auto& cur = layer(k);
      std::vector<double> next(cur.size(), inf);
      parent[k].assign(cur.size(), -1);
      for (std::size_t b = 0; b < cur.size(); ++b)
        for (std::size_t a = 0; a < prev.size(); ++a)
          if (const double c = dist[a] + cost(prev[a], cur[b]); c < next[b]) next[b] = c, parent[k][b] = static_cast<int>(a);
      dist = std::move(next);
    }
    const auto& last = layer(m - 1);
    for (std::size_t a = 0; a < last.size(); ++a) {
      const double c = dist[a] + cost(last[a], s);
      if (c < best) {
        best = c;
        best_path.assign(m, -1);
        best_path[0] = s;
        int idx = static_cast<int>(a);
        for (std::size_t k = m - 1; k >= 1; --k) {
          best_path[k] = layer(k)[static_cast<std::size_t>(idx)];
          if (k >= 2) idx = parent[k][static_cast<std::size_t>(idx)];
        }
      }
    }
  }
  std::vector<int> out(m);
  for (std::size_t k = 0; k < m; ++k) out[(anchor + k) % m] = best_path[k];
  return out;
}

std::vector<int> solve_gtsp(const ClusterGraph& graph, SolveMode mode, std::uint64_t seed, int restarts) {
  const AtspInstance atsp = noon_bean(graph);
  const int n = static_cast<int>(graph.num_vertices());
  if (mode == SolveMode::Exact) return decode_noon_bean(held_karp(atsp.cost), graph.members);

  const LocalSearch search(atsp.cost);
  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    std::vector<int> t = search.nearest_neighbour(seeded_start(seed, r, n));
    search.improve(t);
    std::vector<int> sel = decode_noon_bean(t, graph.members);
    refine_selection(graph, sel);
    if (const double c = selection_cost(graph.cost, sel); c < best_cost) best_cost = c, best = std::move(sel);
  }
  return best;
}

double Leg::length() const {
  return std::visit([](const auto& p) { return p.length(); }, path);
}

std::vector<Configuration> Leg::sample(double ds) const {
  if (const auto* p2 = std::get_if<dubins::DubinsPath2>(&path)) return dubins::sample_path(*p2, ds, altitude);
  return dubins::sample_path(std::get<dubins::DubinsPath3>(path), ds);
}

Tour make_tour(const std::vector<Configuration>& configs, const std::vector<std::size_t>& targets,
               const dubins::VehicleParams& params, LegModel model) {
  Tour t;
  t.configs = configs;
  t.targets = targets;
  const std::size_t m = configs.size();
  t.legs.resize(m);
  parallel_for(m, [&](std::size_t i) {
    const Configuration& a = configs[i];
    const Configuration& b = configs[(i + 1) % m];
    Leg& leg = t.legs[i];
    if (model == LegModel::Planar) {
      leg.path = dubins::plan_2d({a.x, a.y, a.psi}, {b.x, b.y, b.psi}, params.rho_min);
      leg.altitude = a.z;
    } else {
      leg.path = dubins::plan_3d(a, b, params);
    }
  });
  for (const auto& leg : t.legs) t.length += leg.length();
  t.normalized_cost = t.length / params.rho_min;
  return t;
}

Tour extract_tour(const std::vector<int>& atsp_order, const ClusterGraph& graph, const dubins::VehicleParams& params,
                  LegModel model) {
  const auto sel = decode_noon_bean(atsp_order, graph.members);
  std::vector<Configuration> configs;
  std::vector<std::size_t> targets;
  for (int v : sel) {
    configs.push_back(graph.vertices[static_cast<std::size_t>(v)]);
    targets.push_back(graph.targets[static_cast<std::size_t>(graph.cluster_of[static_cast<std::size_t>(v)])]);
  }
  return make_tour(configs, targets, params, model);
}

void check_tour(const Tour& tour, std::size_t num_targets) {
  if (tour.configs.size() != tour.targets.size() || tour.legs.size() != tour.configs.size())
    throw ValidationError("visit each once", "tour has mismatched configuration, target and leg counts");
  std::vector<int> count(num_targets, 0);
  for (std::size_t t : tour.targets) {
    if (t >= num_targets) throw ValidationError("visit each once", "tour visits an unknown target");
    if (++count[t] > 1) throw ValidationError("visit each once", "target " + std::to_string(t) + " is visited twice");
  }
  for (std::size_t t = 0; t < num_targets; ++t)
    if (count[t] == 0) throw ValidationError("visit all", "target " + std::to_string(t) + " is not visited");
}

std::vector<Configuration> bisect_angle_approx(const Eigen::MatrixX3d& positions, const dubins::VehicleParams& params) {
  const Eigen::Index m = positions.rows();
  if (m < 2) throw ValidationError("cluster count", "angle assignment needs at least two positions");
  auto row = [&](Eigen::Index i) -> Point3 { return positions.row(((i % m) + m) % m).transpose(); };
  auto clip = [&](double g) { return std::clamp(g, params.gamma_min, params.gamma_max); };
  auto heading = [](const Point3& d) { return std::atan2(d.y(), d.x()); };
  auto elevation = [](const Point3& d) { return std::atan2(d.z(), std::hypot(d.x(), d.y())); };
  constexpr double tiny = 1e-12;

  std::vector<Configuration> out;
  for (Eigen::Index i = 0; i < m; ++i) {
    Point3 b = row(i + 1) - row(i - 1);
    if (b.norm() < tiny) b = row(i + 1) - row(i);
    if (b.norm() < tiny) b = row(i) - row(i - 1);
    if (b.norm() < tiny) b = Point3::UnitX();
    out.emplace_back(row(i), heading(b), clip(elevation(b)));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Point3 w = row(i + 1) - row(i);
    if (w.norm() < 4.0 * params.rho_min && w.norm() >= tiny) {
      auto& a = out[static_cast<std::size_t>(i)];
      auto& b = out[static_cast<std::size_t>((i + 1) % m)];
      a = Configuration(a.position(), heading(w), clip(elevation(w)));
      b = Configuration(b.position(), heading(w), clip(elevation(w)));
      ++i;
    }
  }
  return out;
}

Tour plan_dtspn(const sampling::ClusterSamples& samples, CostMode mode, const dubins::VehicleParams& params,
                SolveMode solve, std::uint64_t seed) {
  const ClusterGraph g = build_graph(samples, mode, params);
  const auto sel = solve_gtsp(g, solve, seed);
  std::vector<Configuration> configs;
  std::vector<std::size_t> targets;
  for (int v : sel) {
    configs.push_back(g.vertices[static_cast<std::size_t>(v)]);
    targets.push_back(g.targets[static_cast<std::size_t>(g.cluster_of[static_cast<std::size_t>(v)])]);
  }
  return make_tour(configs, targets, params, mode == CostMode::Planar2D ? LegModel::Planar : LegModel::Dubins3D);
}

sampling::ClusterSamples unique_positions(const sampling::ClusterSamples& samples) {
  sampling::ClusterSamples out;
  for (const auto& c : samples) {
    auto& u = out.emplace_back();
    u.target = c.target;
    std::vector<Point3> seen;
    for (const auto& q : c.configs) {
      const Point3 p = q.position();
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
      seen.push_back(p);
      u.configs.emplace_back(p, 0.0, 0.0);
    }
  }
  return out;
}

Tour plan_metspn(const sampling::ClusterSamples& samples, const dubins::VehicleParams& params, SolveMode solve,
                 std::uint64_t seed) {
  const ClusterGraph g = build_graph(unique_positions(samples), CostMode::ModifiedEuclidean, params);
  const auto sel = solve_gtsp(g, solve, seed);
  Eigen::MatrixX3d positions(static_cast<Eigen::Index>(sel.size()), 3);
  std::vector<std::size_t> targets;
  for (std::size_t k = 0; k < sel.size(); ++k) {
    positions.row(static_cast<Eigen::Index>(k)) = g.vertices[static_cast<std::size_t>(sel[k])].position().transpose();
    targets.push_back(g.targets[static_cast<std::size_t>(g.cluster_of[static_cast<std::size_t>(sel[k])])]);
  }
  return make_tour(bisect_angle_approx(positions, params), targets, params, LegModel::Dubins3D);
}

}  // namespace viewplan::tour
