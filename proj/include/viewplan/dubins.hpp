#pragma once

#include "viewplan/error.hpp"
#include "viewplan/types.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace viewplan::dubins {

/// Turn-radius and pitch limits of the airplane.
struct VehicleParams {
  double rho_min = 40.0;           ///< minimum turn radius (m)
  double gamma_min = -kPi / 12.0;  ///< strictly negative
  double gamma_max = kPi / 9.0;    ///< strictly positive
  double speed = 1.0;              ///< m/s, only used to report durations

  /// Throws ValidationError unless rho_min > 0 and gamma_min < 0 < gamma_max.
  void validate() const;
};

/// Vehicle state: position (m), heading psi in [0, 2pi), pitch gamma (unwrapped).
struct Configuration {
  double x = 0, y = 0, z = 0, psi = 0, gamma = 0;

  Configuration() = default;
  Configuration(double x_, double y_, double z_, double psi_, double gamma_)
      : x(x_), y(y_), z(z_), psi(wrap_2pi(psi_)), gamma(gamma_) {}
  Configuration(const Point3& p, double psi_, double gamma_)
      : Configuration(p.x(), p.y(), p.z(), psi_, gamma_) {}

  Point3 position() const { return {x, y, z}; }
};

/// Planar pose (x, y, heading).
struct Pose2 {
  double x = 0, y = 0, heading = 0;
};

enum class Word { LSL, RSR, LSR, RSL, RLR, LRL };

inline constexpr std::array<Word, 6> kAllWords = {Word::LSL, Word::RSR, Word::LSR,
                                                  Word::RSL, Word::RLR, Word::LRL};
inline constexpr std::array<Word, 4> kCscWords = {Word::LSL, Word::RSR, Word::LSR, Word::RSL};

std::string_view to_string(Word w);
bool is_ccc(Word w);

/// Shortest-path primitive: three segments of a word. `params` are normalized by the radius
/// (arc angles in rad, straight length in radii), so each segment is `radius * params[k]` long.
struct DubinsPath2 {
  Pose2 start;
  Word word = Word::LSL;
  std::array<double, 3> params{0, 0, 0};
  double radius = 1.0;

  double length() const { return radius * (params[0] + params[1] + params[2]); }
  double segment_length(int k) const { return radius * params[static_cast<std::size_t>(k)]; }

  /// Pose after travelling arc length `s` (clamped to [0, length()]).
  Pose2 at(double s) const;
  Pose2 end() const { return at(length()); }
};

/// Solves one word; empty when the word has no solution for this pose pair.
std::optional<DubinsPath2> plan_word(const Pose2& from, const Pose2& to, double radius, Word word);

/// Shortest path over the six words. Throws std::invalid_argument for radius <= 0.
DubinsPath2 plan_2d(const Pose2& from, const Pose2& to, double radius);

/// Planar Dubins path flown at one constant pitch between two altitudes.
struct ModifiedPath {
  DubinsPath2 planar;
  double gamma_c = 0.0;  ///< constant flight-path angle
  double length = 0.0;   ///< 3D length, planar length / cos(gamma_c)
  bool feasible = true;  ///< gamma_c within the vehicle's pitch limits
};

ModifiedPath plan_modified_2d(const Configuration& from, const Configuration& to, const VehicleParams& params);

/// Decoupled 3D Dubins airplane path: a horizontal Dubins path in xy at radius rho_h and a
/// vertical CSC Dubins path in the (arc length, altitude) plane at radius rho_v, tied
/// together by 1/rho_min^2 = 1/rho_h^2 + 1/rho_v^2.
struct DubinsPath3 {
  Configuration start;
  DubinsPath2 horizontal;  ///< first arc may include `extra_turns` full circles
  DubinsPath2 vertical;    ///< (s, z) plane, heading = pitch
  double rho_h = 0.0;
  double rho_v = 0.0;
  int extra_turns = 0;
  int evaluations = 0;     ///< candidate radii tried during the search

  double length() const { return vertical.length(); }
  /// Configuration after 3D arc length `t`.
  Configuration at(double t) const;
  Configuration end() const { return at(length()); }
};

struct Plan3dOptions {
  double rho_h_min_factor = 2.0;    ///< search lower bound, multiple of rho_min
  double rho_h_max_factor = 100.0;  ///< search upper bound, multiple of rho_min
  int max_evaluations = 64;
  double rel_tolerance = 1e-4;
  int max_extra_turns = 10000;
};

/// Shortest feasible decoupled path found by searching rho_h. When no radius in the range
/// yields a pitch-feasible vertical profile, full horizontal turns are inserted at the
/// smallest radius. Throws InfeasibleError if even `max_extra_turns` do not suffice, and
/// ValidationError if an endpoint pitch is outside the vehicle limits.
DubinsPath3 plan_3d(const Configuration& from, const Configuration& to, const VehicleParams& params,
                    const Plan3dOptions& options = {});

/// Vertical profile from (0, z0, gamma0) to (s_end, z1, gamma1) with pitch kept inside
/// [gamma_min, gamma_max]; empty when no CSC word qualifies.
std::optional<DubinsPath2> plan_vertical(double s_end, double z0, double gamma0, double z1, double gamma1,
                                         double rho_v, double gamma_min, double gamma_max);

/// Samples at arc-length steps `ds`, always including both endpoints. Planar paths are
/// returned at altitude `z` with zero pitch.
std::vector<Configuration> sample_path(const DubinsPath2& path, double ds, double z = 0.0);
std::vector<Configuration> sample_path(const DubinsPath3& path, double ds);

}  // namespace viewplan::dubins
