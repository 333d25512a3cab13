#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbarom/kinematics.hpp"

namespace sbarom {

/// Natural cubic spline y(s) (zero second derivative at both ends).
///
/// On interval k, y(s) = a_k + b_k t + c_k t^2 + d_k t^3 with t = s - s_k.
class CubicSpline1D {
 public:
  /// Throws InvalidInput for fewer than 3 knots or non-increasing knots.
  CubicSpline1D(std::span<const double> knots, std::span<const double> values);

  double operator()(double s) const { return eval(s, 0); }
  double derivative(double s) const { return eval(s, 1); }
  double second_derivative(double s) const { return eval(s, 2); }

  const std::vector<double>& knots() const noexcept { return knots_; }
  std::size_t intervals() const noexcept { return b_.size(); }

  struct Coefficients {
    double a, b, c, d;
  };
  Coefficients coefficients(std::size_t interval) const;

 private:
  std::size_t interval_of(double s) const;
  double eval(double s, int order) const;

  std::vector<double> knots_;
  std::vector<double> a_, b_, c_, d_;
};

/// Planar curve through nodes, parameterised by cumulative chord length.
class SplineCurve {
 public:
  /// Throws InvalidInput for fewer than 3 nodes or repeated consecutive nodes.
  explicit SplineCurve(std::span<const Vec2> nodes);

  Vec2 operator()(double s) const { return {x_(s), y_(s)}; }
  Vec2 derivative(double s) const { return {x_.derivative(s), y_.derivative(s)}; }
  Vec2 second_derivative(double s) const {
    return {x_.second_derivative(s), y_.second_derivative(s)};
  }

  const std::vector<double>& knots() const noexcept { return x_.knots(); }
  double start() const { return knots().front(); }
  double end() const { return knots().back(); }
  const CubicSpline1D& x() const noexcept { return x_; }
  const CubicSpline1D& y() const noexcept { return y_; }

 private:
  CubicSpline1D x_;
  CubicSpline1D y_;
};

/// Cumulative chord length along a polyline, starting at 0.
std::vector<double> cumulative_chord(std::span<const Vec2> points);

SplineCurve spline_through(std::span<const Vec2> nodes);

}  // namespace sbarom
