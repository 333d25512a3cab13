#include "sbarom/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbarom/error.hpp"

namespace sbarom {

namespace {

std::vector<double> checked_chord(std::span<const Vec2> nodes) {
  if (nodes.size() < 3) {
    throw InvalidInput("spline needs at least 3 nodes, got " + std::to_string(nodes.size()));
  }
  return cumulative_chord(nodes);
}

}  // namespace

std::vector<double> cumulative_chord(std::span<const Vec2> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k) {
    s[k] = s[k - 1] + (points[k] - points[k - 1]).norm();
  }
  return s;
}

CubicSpline1D::CubicSpline1D(std::span<const double> knots, std::span<const double> values)
    : knots_(knots.begin(), knots.end()) {
  const std::size_t m = knots.size();
  if (m < 3) throw InvalidInput("spline needs at least 3 knots");
  if (values.size() != m) throw InvalidInput("spline knots and values differ in length");
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(knots[k]) || !std::isfinite(values[k])) {
      throw InvalidInput("spline data must be finite");
    }
    if (k > 0 && !(knots[k] > knots[k - 1])) {
      throw InvalidInput("spline parameters must be strictly increasing (repeat at knot " +
                         std::to_string(k) + ")");
    }
  }

  const std::size_t intervals = m - 1;
  std::vector<double> h(intervals);
  for (std::size_t k = 0; k < intervals; ++k) h[k] = knots[k + 1] - knots[k];

  // Second derivatives M_k at the knots; natural ends give M_0 = M_{m-1} = 0.
  // Interior rows: h_{k-1} M_{k-1} + 2(h_{k-1}+h_k) M_k + h_k M_{k+1} = rhs_k.
  std::vector<double> second(m, 0.0);
  const std::size_t interior = m - 2;
  std::vector<double> diag(interior), upper(interior), rhs(interior);
  for (std::size_t r = 0; r < interior; ++r) {
    const std::size_t k = r + 1;
    diag[r] = 2.0 * (h[k - 1] + h[k]);
    upper[r] = h[k];
    rhs[r] = 6.0 * ((values[k + 1] - values[k]) / h[k] - (values[k] - values[k - 1]) / h[k - 1]);
  }
  // Thomas algorithm; the system is symmetric and strictly diagonally dominant.
  for (std::size_t r = 1; r < interior; ++r) {
    const double lower = h[r];  // sub-diagonal entry of row r is h_{k-1} with k = r + 1
    const double w = lower / diag[r - 1];
    diag[r] -= w * upper[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  for (std::size_t r = interior; r-- > 0;) {
    const double next = (r + 1 < interior) ? second[r + 2] : 0.0;
    second[r + 1] = (rhs[r] - upper[r] * next) / diag[r];
  }

  a_.resize(intervals);
  b_.resize(intervals);
  c_.resize(intervals);
  d_.resize(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    a_[k] = values[k];
    b_[k] = (values[k + 1] - values[k]) / h[k] - h[k] * (2.0 * second[k] + second[k + 1]) / 6.0;
    c_[k] = second[k] / 2.0;
    d_[k] = (second[k + 1] - second[k]) / (6.0 * h[k]);
  }
}

CubicSpline1D::Coefficients CubicSpline1D::coefficients(std::size_t interval) const {
  return {a_.at(interval), b_.at(interval), c_.at(interval), d_.at(interval)};
}

std::size_t CubicSpline1D::interval_of(double s) const {
  // Last knot <= s, clamped to a valid interval; evaluation outside the knot
  // range extrapolates the end polynomials.
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
  return std::min(idx, b_.size() - 1);
}

double CubicSpline1D::eval(double s, int order) const {
  const std::size_t k = interval_of(s);
  const double t = s - knots_[k];
  switch (order) {
    case 0:
      return a_[k] + t * (b_[k] + t * (c_[k] + t * d_[k]));
    case 1:
      return b_[k] + t * (2.0 * c_[k] + 3.0 * t * d_[k]);
    default:
      return 2.0 * c_[k] + 6.0 * t * d_[k];
  }
}

namespace {

std::vector<double> component(std::span<const Vec2> nodes, int axis) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& p : nodes) out.push_back(p[axis]);
  return out;
}

}  // namespace

SplineCurve::SplineCurve(std::span<const Vec2> nodes)
    : x_(checked_chord(nodes), component(nodes, 0)),
      y_(cumulative_chord(nodes), component(nodes, 1)) {}

SplineCurve spline_through(std::span<const Vec2> nodes) { return SplineCurve(nodes); }

}  // namespace sbarom
