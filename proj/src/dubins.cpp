#include "viewplan/dubins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace viewplan::dubins {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Seg { L, S, R };

std::array<Seg, 3> segments_of(Word w) {
  switch (w) {
    case Word::LSL: return {Seg::L, Seg::S, Seg::L};
    case Word::RSR: return {Seg::R, Seg::S, Seg::R};
    case Word::LSR: return {Seg::L, Seg::S, Seg::R};
    case Word::RSL: return {Seg::R, Seg::S, Seg::L};
    case Word::RLR: return {Seg::R, Seg::L, Seg::R};
    case Word::LRL: return {Seg::L, Seg::R, Seg::L};
  }
  return {Seg::L, Seg::S, Seg::L};
}

/// Advances a pose along one segment of normalized length `u` at radius `r`.
Pose2 advance(const Pose2& p, Seg seg, double u, double r) {
  const double h = p.heading;
  switch (seg) {
    case Seg::L:
      return {p.x + r * (std::sin(h + u) - std::sin(h)), p.y + r * (std::cos(h) - std::cos(h + u)), h + u};
    case Seg::R:
      return {p.x + r * (std::sin(h) - std::sin(h - u)), p.y + r * (std::cos(h - u) - std::cos(h)), h - u};
    case Seg::S:
      return {p.x + r * u * std::cos(h), p.y + r * u * std::sin(h), h};
  }
  return p;
}

// Normalized word solutions. alpha, beta are the start/end headings relative to the chord,
// d the chord length in radii.
struct Normalized {
  double d, alpha, beta, sa, sb, ca, cb, cab;
};

std::optional<std::array<double, 3>> solve_normalized(const Normalized& n, Word w) {
  const double d = n.d, a = n.alpha, b = n.beta, sa = n.sa, sb = n.sb, ca = n.ca, cb = n.cb, cab = n.cab;
  constexpr double kSlack = 1e-10;
  switch (w) {
    case Word::LSL: {
      const double psq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
      if (psq < -kSlack) return std::nullopt;
      const double phi = std::atan2(cb - ca, d + sa - sb);
      return std::array<double, 3>{wrap_2pi(phi - a), std::sqrt(std::max(psq, 0.0)), wrap_2pi(b - phi)};
    }
    case Word::RSR: {
      const double psq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
      if (psq < -kSlack) return std::nullopt;
      const double phi = std::atan2(ca - cb, d - sa + sb);
      return std::array<double, 3>{wrap_2pi(a - phi), std::sqrt(std::max(psq, 0.0)), wrap_2pi(phi - b)};
    }
    case Word::LSR: {
      const double psq = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
      if (psq < -kSlack) return std::nullopt;
      const double p = std::sqrt(std::max(psq, 0.0));
      const double phi = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      return std::array<double, 3>{wrap_2pi(phi - a), p, wrap_2pi(phi - b)};
    }
    case Word::RSL: {
      const double psq = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb);
      if (psq < -kSlack) return std::nullopt;
      const double p = std::sqrt(std::max(psq, 0.0));
      const double phi = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      return std::array<double, 3>{wrap_2pi(a - phi), p, wrap_2pi(b - phi)};
    }
    case Word::RLR: {
      const double c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
      if (std::abs(c) > 1.0 + kSlack) return std::nullopt;
      const double phi = std::atan2(ca - cb, d - sa + sb);
      const double p = wrap_2pi(kTwoPi - std::acos(std::clamp(c, -1.0, 1.0)));
      const double t = wrap_2pi(a - phi + p / 2.0);
      return std::array<double, 3>{t, p, wrap_2pi(a - b - t + p)};
    }
    case Word::LRL: {
      const double c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
      if (std::abs(c) > 1.0 + kSlack) return std::nullopt;
      const double phi = std::atan2(ca - cb, d + sa - sb);
      const double p = wrap_2pi(kTwoPi - std::acos(std::clamp(c, -1.0, 1.0)));
      const double t = wrap_2pi(-a - phi + p / 2.0);
      return std::array<double, 3>{t, p, wrap_2pi(b - a - t + p)};
    }
  }
  return std::nullopt;
}

Normalized normalize(const Pose2& from, const Pose2& to, double radius) {
  const double dx = to.x - from.x, dy = to.y - from.y;
  const double D = std::hypot(dx, dy);
  const double theta = D > 0.0 ? std::atan2(dy, dx) : 0.0;
  Normalized n{};
  n.d = D / radius;
  n.alpha = wrap_2pi(from.heading - theta);
  n.beta = wrap_2pi(to.heading - theta);
  n.sa = std::sin(n.alpha);
  n.sb = std::sin(n.beta);
  n.ca = std::cos(n.alpha);
  n.cb = std::cos(n.beta);
  n.cab = std::cos(n.alpha - n.beta);
  return n;
}

}  // namespace

std::string_view to_string(Word w) {
  switch (w) {
    case Word::LSL: return "LSL";
    case Word::RSR: return "RSR";
    case Word::LSR: return "LSR";
    case Word::RSL: return "RSL";
    case Word::RLR: return "RLR";
    case Word::LRL: return "LRL";
  }
  return "?";
}

bool is_ccc(Word w) { return w == Word::RLR || w == Word::LRL; }

void VehicleParams::validate() const {
  if (!(rho_min > 0.0)) throw ValidationError("turn radius", "vehicle: rho_min must be positive");
  if (!(gamma_min < 0.0)) throw ValidationError("pitch limits", "vehicle: gamma_min must be strictly negative");
  if (!(gamma_max > 0.0)) throw ValidationError("pitch limits", "vehicle: gamma_max must be strictly positive");
}

Pose2 DubinsPath2::at(double s) const {
  s = std::clamp(s, 0.0, length());
  const auto segs = segments_of(word);
  Pose2 p = start;
  double u = s / radius;
  for (int k = 0; k < 3; ++k) {
    const double seg = params[static_cast<std::size_t>(k)];
    const double step = std::min(u, seg);
    p = advance(p, segs[static_cast<std::size_t>(k)], step, radius);
    u -= step;
    if (u <= 0.0) break;
  }
  return p;
}

std::optional<DubinsPath2> plan_word(const Pose2& from, const Pose2& to, double radius, Word word) {
  if (!(radius > 0.0)) throw std::invalid_argument("plan_word: radius must be positive");
  const auto params = solve_normalized(normalize(from, to, radius), word);
  if (!params) return std::nullopt;
  DubinsPath2 path;
  path.start = {from.x, from.y, wrap_2pi(from.heading)};
  path.word = word;
  path.params = *params;
  path.radius = radius;
  return path;
}

DubinsPath2 plan_2d(const Pose2& from, const Pose2& to, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("plan_2d: radius must be positive");
  const Normalized n = normalize(from, to, radius);
  DubinsPath2 best;
  best.start = {from.x, from.y, wrap_2pi(from.heading)};
  best.radius = radius;
  double best_len = kInf;
  for (Word w : kAllWords) {
    const auto p = solve_normalized(n, w);
    if (!p) continue;
    const double len = (*p)[0] + (*p)[1] + (*p)[2];
    if (len < best_len) {
      best_len = len;
      best.word = w;
      best.params = *p;
    }
  }
  return best;
}

ModifiedPath plan_modified_2d(const Configuration& from, const Configuration& to, const VehicleParams& params) {
  ModifiedPath out;
  out.planar = plan_2d({from.x, from.y, from.psi}, {to.x, to.y, to.psi}, params.rho_min);
  const double planar = out.planar.length();
  const double dz = to.z - from.z;
  out.gamma_c = std::atan2(dz, planar);
  out.length = std::hypot(planar, dz);
  out.feasible = out.gamma_c >= params.gamma_min && out.gamma_c <= params.gamma_max;
  return out;
}

std::optional<DubinsPath2> plan_vertical(double s_end, double z0, double gamma0, double z1, double gamma1,
                                         double rho_v, double gamma_min, double gamma_max) {
  const Pose2 from{0.0, z0, gamma0};
  const Pose2 to{s_end, z1, gamma1};
  const Normalized n = normalize(from, to, rho_v);
  constexpr double kPitchTol = 1e-12;
  std::optional<DubinsPath2> best;
  for (Word w : kCscWords) {
    const auto p = solve_normalized(n, w);
    if (!p) continue;
    const auto segs = segments_of(w);
    // unwrapped pitch after the first arc and at the end; arcs are monotone in pitch so these
    // two values bound the whole profile
    const double straight = segs[0] == Seg::L ? gamma0 + (*p)[0] : gamma0 - (*p)[0];
    const double final_pitch = segs[2] == Seg::L ? straight + (*p)[2] : straight - (*p)[2];
    if (straight < gamma_min - kPitchTol || straight > gamma_max + kPitchTol) continue;
    if (std::abs(final_pitch - gamma1) > 1e-9) continue;
    const double len = rho_v * ((*p)[0] + (*p)[1] + (*p)[2]);
    if (!best || len < best->length()) {
      DubinsPath2 path;
      path.start = from;
      path.word = w;
      path.params = *p;
      path.radius = rho_v;
      best = path;
    }
  }
  return best;
}

Configuration DubinsPath3::at(double t) const {
  const Pose2 v = vertical.at(t);
  const Pose2 h = horizontal.at(v.x);
  return Configuration(h.x, h.y, v.y, h.heading, v.heading);
}

namespace {

struct Candidate {
  double rho_h = 0.0;
  double length = kInf;
  std::optional<DubinsPath3> path;
  bool feasible() const { return path.has_value(); }
};

class RadiusSearch {
 public:
  RadiusSearch(const Configuration& a, const Configuration& b, const VehicleParams& vp, const Plan3dOptions& opt)
      : a_(a), b_(b), vp_(vp), opt_(opt) {}

  Candidate eval(double rho_h, int turns = 0) {
    ++evaluations_;
    Candidate c;
    c.rho_h = rho_h;
    DubinsPath2 horiz = plan_2d({a_.x, a_.y, a_.psi}, {b_.x, b_.y, b_.psi}, rho_h);
    horiz.params[0] += kTwoPi * turns;
    const double inv_v2 = 1.0 / (vp_.rho_min * vp_.rho_min) - 1.0 / (rho_h * rho_h);
    const double rho_v = 1.0 / std::sqrt(inv_v2);
    auto vert = plan_vertical(horiz.length(), a_.z, a_.gamma, b_.z, b_.gamma, rho_v, vp_.gamma_min, vp_.gamma_max);
    if (!vert) return c;
    DubinsPath3 p;
    p.start = a_;
    p.horizontal = horiz;
    p.vertical = *vert;
    p.rho_h = rho_h;
    p.rho_v = rho_v;
    p.extra_turns = turns;
    c.length = p.length();
    c.path = std::move(p);
    return c;
  }

  int evaluations() const { return evaluations_; }
  bool budget_left() const { return evaluations_ < opt_.max_evaluations; }

 private:
  const Configuration& a_;
  const Configuration& b_;
  const VehicleParams& vp_;
  const Plan3dOptions& opt_;
  int evaluations_ = 0;
};

}  // namespace

DubinsPath3 plan_3d(const Configuration& from, const Configuration& to, const VehicleParams& params,
                    const Plan3dOptions& opt) {
  params.validate();
  constexpr double kPitchSlack = 1e-9;
  for (const Configuration* q : {&from, &to}) {
    if (q->gamma < params.gamma_min - kPitchSlack || q->gamma > params.gamma_max + kPitchSlack) {
      std::ostringstream msg;
      msg << "plan_3d: endpoint pitch " << q->gamma << " outside [" << params.gamma_min << ", " << params.gamma_max
          << "]";
      throw ValidationError("pitch limits", msg.str());
    }
  }
  Configuration a = from, b = to;
  a.gamma = std::clamp(a.gamma, params.gamma_min, params.gamma_max);
  b.gamma = std::clamp(b.gamma, params.gamma_min, params.gamma_max);

  RadiusSearch search(a, b, params, opt);
  const double lo = opt.rho_h_min_factor * params.rho_min;
  const double hi = opt.rho_h_max_factor * params.rho_min;
  const double tol = opt.rel_tolerance;

  auto finish = [&](Candidate c) {
    c.path->evaluations = search.evaluations();
    return *c.path;
  };
  auto better = [](const Candidate& x, const Candidate& y) { return x.length < y.length; };

  Candidate best = search.eval(lo);
  if (!best.feasible()) {
    // grow the radius until the horizontal path is long enough for the climb
    Candidate prev = best;
    Candidate cur = best;
    while (!cur.feasible() && cur.rho_h < hi && search.budget_left()) {
      prev = cur;
      cur = search.eval(std::min(cur.rho_h * 2.0, hi));
    }
    if (!cur.feasible()) {
      // no radius in range works: spiral with full turns at the smallest radius
      for (int turns = 1; turns <= opt.max_extra_turns; ++turns) {
        Candidate c = search.eval(lo, turns);
        if (c.feasible()) return finish(c);
      }
      throw InfeasibleError("plan_3d: no pitch-feasible path within the turn budget");
    }
    // the shortest feasible path usually sits on the feasibility boundary
    double bad = prev.rho_h, good = cur.rho_h;
    best = cur;
    while ((good - bad) > tol * good && search.budget_left()) {
      const double mid = 0.5 * (bad + good);
      Candidate c = search.eval(mid);
      if (c.feasible()) {
        good = mid;
        if (better(c, best)) best = c;
      } else {
        bad = mid;
      }
    }
  }

  // probe above the current best radius; stop if the length does not drop
  if (!search.budget_left()) return finish(best);
  Candidate probe = search.eval(std::min(best.rho_h * (1.0 + 10.0 * tol), hi));
  if (!probe.feasible() || probe.length >= best.length) return finish(best);

  // bracket a minimum by doubling, then golden-section inside the bracket
  double left = best.rho_h;
  Candidate mid = probe;
  Candidate right = probe;
  while (search.budget_left()) {
    const double next = std::min(right.rho_h * 2.0, hi);
    if (next <= right.rho_h) break;
    Candidate c = search.eval(next);
    if (!c.feasible() || c.length >= right.length) {
      right = c;
      break;
    }
    left = mid.rho_h;
    mid = c;
    right = c;
  }
  if (better(mid, best)) best = mid;

  constexpr double kInvPhi = 0.6180339887498949;
  double x0 = left, x3 = right.rho_h;
  double x1 = x3 - kInvPhi * (x3 - x0), x2 = x0 + kInvPhi * (x3 - x0);
  if (!search.budget_left()) return finish(best);
  Candidate f1 = search.eval(x1);
  if (!search.budget_left()) return finish(better(f1, best) ? f1 : best);
  Candidate f2 = search.eval(x2);
  if (better(f1, best)) best = f1;
  if (better(f2, best)) best = f2;
  while ((x3 - x0) > tol * x3 && search.budget_left()) {
    if (std::isfinite(f1.length) && std::isfinite(f2.length) &&
        std::abs(f1.length - f2.length) <= tol * std::min(f1.length, f2.length) * 1e-2)
      break;
    if (f1.length <= f2.length) {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x3 - kInvPhi * (x3 - x0);
      f1 = search.eval(x1);
      if (better(f1, best)) best = f1;
    } else {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + kInvPhi * (x3 - x0);
      f2 = search.eval(x2);
      if (better(f2, best)) best = f2;
    }
  }
  return finish(best);
}

std::vector<Configuration> sample_path(const DubinsPath2& path, double ds, double z) {
  if (!(ds > 0.0)) throw std::invalid_argument("sample_path: ds must be positive");
  std::vector<Configuration> out;
  const double len = path.length();
  const auto n = static_cast<std::size_t>(std::floor(len / ds));
  for (std::size_t k = 0; k <= n; ++k) {
    const Pose2 p = path.at(static_cast<double>(k) * ds);
    out.emplace_back(p.x, p.y, z, p.heading, 0.0);
  }
  if (len - static_cast<double>(n) * ds > 1e-9 * std::max(1.0, len)) {
    const Pose2 p = path.at(len);
    out.emplace_back(p.x, p.y, z, p.heading, 0.0);
  }
  return out;
}

std::vector<Configuration> sample_path(const DubinsPath3& path, double ds) {
  if (!(ds > 0.0)) throw std::invalid_argument("sample_path: ds must be positive");
  std::vector<Configuration> out;
  const double len = path.length();
  const auto n = static_cast<std::size_t>(std::floor(len / ds));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(path.at(static_cast<double>(k) * ds));
  if (len - static_cast<double>(n) * ds > 1e-9 * std::max(1.0, len)) out.push_back(path.at(len));
  return out;
}

}  // namespace viewplan::dubins
