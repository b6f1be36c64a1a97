#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace viewplan {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// East-north(-up) coordinates in meters.
using Point2 = Vec2<double>;
using Point3 = Vec3<double>;

using Polygon2 = std::vector<Point2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
template <typename Scalar>
inline Scalar wrap_2pi(Scalar angle) {
  Scalar r = std::fmod(angle, Scalar(kTwoPi));
  if (r < Scalar(0)) r += Scalar(kTwoPi);
  if (r >= Scalar(kTwoPi)) r = Scalar(0);
  return r;
}

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
inline Scalar wrap_pi(Scalar angle) {
  Scalar r = wrap_2pi(angle);
  return r > Scalar(kPi) ? r - Scalar(kTwoPi) : r;
}

}  // namespace viewplan
