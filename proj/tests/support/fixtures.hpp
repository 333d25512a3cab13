#pragma once

// Synthetic data generators and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code path it is used to check.

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sbarom/sbarom.hpp"

namespace sbarom::testing {

/// `count` points on a +Y line with the given spacing, starting at the origin.
inline SensorFrame straight_frame(std::size_t count, double spacing, double time = 0.0) {
  SensorFrame f{time, {}};
  for (std::size_t k = 0; k < count; ++k) f.points.emplace_back(0.0, spacing * static_cast<double>(k));
  return f;
}

/// Point on a CCW arc of radius r that starts at the origin heading +Y.
inline Vec2 arc_point(double radius, double arc_length) {
  const double phi = arc_length / radius;
  return {-radius + radius * std::cos(phi), radius * std::sin(phi)};
}

/// Arc of total angle `sweep` sampled at uniform arc spacing (last point exact).
inline SensorFrame arc_frame(double radius, double sweep, double spacing, double time = 0.0) {
  SensorFrame f{time, {}};
  const double total = radius * sweep;
  const auto count = static_cast<std::size_t>(std::floor(total / spacing + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) f.points.push_back(arc_point(radius, spacing * static_cast<double>(k)));
  return f;
}

inline SensorFrame semicircle_frame(double radius, double spacing, double time = 0.0) {
  return arc_frame(radius, std::numbers::pi, spacing, time);
}

/// Points along the straight links of a chain: each link contributes
/// `per_link` equal steps and every joint is an exact sample.
inline SensorFrame chain_polyline_frame(const LinkChain& chain, const VecX& q, std::size_t per_link,
                                        double time = 0.0) {
  const auto joints = joint_positions(chain, q);
  SensorFrame f{time, {joints.front()}};
  for (std::size_t i = 1; i < joints.size(); ++i) {
    for (std::size_t k = 1; k < per_link; ++k) {
      const double w = static_cast<double>(k) / static_cast<double>(per_link);
      f.points.push_back(joints[i - 1] + w * (joints[i] - joints[i - 1]));
    }
    f.points.push_back(joints[i]);
  }
  return f;
}

/// Smooth shape through a chain's joints: a natural spline through the joint
/// positions, resampled at uniform arc spacing (arc length from a fine
/// polyline approximation).
inline SensorFrame chain_spline_frame(const LinkChain& chain, const VecX& q, double spacing,
                                      double time = 0.0) {
  const auto joints = joint_positions(chain, q);
  const SplineCurve curve(joints);
  constexpr std::size_t fine = 20000;
  std::vector<double> param(fine + 1), arc(fine + 1, 0.0);
  Vec2 prev = curve(curve.start());
  for (std::size_t j = 0; j <= fine; ++j) {
    param[j] = curve.start() + (curve.end() - curve.start()) * static_cast<double>(j) / fine;
    const Vec2 p = curve(param[j]);
    if (j > 0) arc[j] = arc[j - 1] + (p - prev).norm();
    prev = p;
  }
  SensorFrame f{time, {}};
  std::size_t j = 0;
  for (double s = 0.0; s <= arc.back() + 1e-12; s += spacing) {
    while (j + 1 < fine && arc[j + 1] < s) ++j;
    const double w = (s - arc[j]) / (arc[j + 1] - arc[j]);
    f.points.push_back(curve(param[j] + w * (param[j + 1] - param[j])));
  }
  return f;
}

// ------------------------------------------------------------------ oracles

/// Homogeneous 3x3 matrix of one link (rotation then +Y translation).
inline Eigen::Matrix3d link_htm(const LinkParams& link, double theta) {
  const double a = theta + link.offset;
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  rot(0, 0) = std::cos(a);
  rot(0, 1) = -std::sin(a);
  rot(1, 0) = std::sin(a);
  rot(1, 1) = std::cos(a);
  Eigen::Matrix3d trans = Eigen::Matrix3d::Identity();
  trans(1, 2) = link.length;
  return rot * trans;
}

/// Pose of link i as the explicit product T_1 ... T_i.
inline Eigen::Matrix3d product_fk(const LinkChain& chain, const VecX& q, std::size_t i) {
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  for (std::size_t k = 0; k <= i; ++k) t = t * link_htm(chain[k], q[static_cast<Eigen::Index>(k)]);
  return t;
}

/// Least-squares circle through points (algebraic fit); returns centre and radius.
inline std::pair<Vec2, double> fit_circle(const std::vector<Vec2>& pts) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    a(r, 0) = pts[k].x();
    a(r, 1) = pts[k].y();
    a(r, 2) = 1.0;
    b[r] = -(pts[k].squaredNorm());
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Vec2 centre(-sol[0] / 2.0, -sol[1] / 2.0);
  return {centre, std::sqrt(centre.squaredNorm() - sol[2])};
}

/// Nearest distance from p to the curve by plain scanning at `step`.
inline double brute_nearest(const SplineCurve& curve, const Vec2& p, double step) {
  double best = std::numeric_limits<double>::infinity();
  const auto count = static_cast<std::size_t>(std::ceil((curve.end() - curve.start()) / step));
  for (std::size_t j = 0; j <= count; ++j) {
    const double s = std::min(curve.end(), curve.start() + step * static_cast<double>(j));
    best = std::min(best, (curve(s) - p).norm());
  }
  return best;
}

inline LinkChain random_chain(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> len(0.01, 0.06);
  std::uniform_real_distribution<double> off(-0.5, 0.5);
  std::uniform_real_distribution<double> mass(0.005, 0.03);
  std::uniform_real_distribution<double> frac(0.2, 0.8);
  std::vector<LinkParams> links(n);
  for (auto& l : links) {
    l.length = len(rng);
    l.offset = off(rng);
    l.mass = mass(rng);
    l.com_distance = frac(rng) * l.length;
    l.inertia_com = l.mass * l.length * l.length / 12.0;
  }
  return LinkChain(std::move(links));
}

inline VecX random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  VecX v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

/// Nominal actuator: 5 links, 0.17 m, 69 g, r2 = 10 mm.
inline ActuatorGeometry nominal_geometry() { return ActuatorGeometry{}; }
inline DynamicsParams nominal_params(std::size_t n = 5) { return DynamicsParams::uniform(1.6067, 0.008, n); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sbarom_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Frames of a simulated step response at the given times, sampled as
/// polylines with `per_link` points per link (joints exact).
inline std::vector<SensorFrame> frames_from_trajectory(const LinkChain& chain, const Trajectory& traj,
                                                       const std::vector<double>& times,
                                                       std::size_t per_link) {
  std::vector<SensorFrame> frames;
  for (double t : times) frames.push_back(chain_polyline_frame(chain, traj.state_at(t).q, per_link, t));
  return frames;
}

}  // namespace sbarom::testing
