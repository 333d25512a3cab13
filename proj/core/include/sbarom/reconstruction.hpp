#pragma once

// Shape reconstruction from dense point samples: segmentation into an n-link
// chain, natural-spline reconstruction through the chain's joints, error
// metrics and model-order selection.

#include <cstddef>
#include <span>
#include <vector>

#include "sbarom/kinematics.hpp"
#include "sbarom/spline.hpp"

namespace sbarom {

/// One timestamped snapshot of ordered planar points, base to tip, in the task frame.
struct SensorFrame {
  double time = 0.0;
  std::vector<Vec2> points;

  /// Throws InvalidInput unless there are at least `min_points` finite,
  /// pairwise-distinct consecutive points and the time is finite and >= 0.
  void validate(std::size_t min_points = 4) const;
};

struct Segmentation {
  std::vector<std::size_t> indices;  // n + 1 point indices, strictly increasing
  std::vector<Vec2> nodes;           // the corresponding points
};

/// Picks the n + 1 points nearest to chord-length fractions i / n.
Segmentation segment_frame(const SensorFrame& frame, std::size_t n);

/// Link lengths and rest offsets of the unactuated reference shape (zero masses).
LinkChain fit_reference_chain(const SensorFrame& reference, std::size_t n);

/// Heading of each node-to-node chord, measured from the +Y axis (CCW positive).
std::vector<double> chord_headings(std::span<const Vec2> nodes);

/// Joint angles of `chain` that best match the frame's segmentation.
VecX frame_to_joint_angles(const SensorFrame& frame, const LinkChain& chain);

struct Deviation {
  double max = 0.0;   // m
  double mean = 0.0;  // m
};

/// Distance of every frame point to the nearest point on the curve.
Deviation max_deviation(const SplineCurve& curve, const SensorFrame& frame);

struct CandidateReport {
  std::size_t n = 0;
  double max_error = 0.0;              // over the whole sequence
  double mean_error = 0.0;             // time average of frame_max
  std::vector<double> frame_max;       // per-frame maximum deviation
  std::vector<double> frame_mean;      // per-frame mean deviation
};

struct OrderSelectionReport {
  std::vector<double> times;
  std::vector<CandidateReport> candidates;
  std::size_t chosen_n = 0;
  double threshold = 0.0;
  bool threshold_met = false;
};

inline constexpr double kDefaultOrderThreshold = 0.003;  // m

OrderSelectionReport select_order(std::span<const SensorFrame> frames, std::size_t n_min,
                                  std::size_t n_max, double threshold = kDefaultOrderThreshold);

struct CurvatureSample {
  double s = 0.0;          // m, cumulative chord length
  double curvature = 0.0;  // 1/m, CCW turning positive
};

/// Three-point (circumscribed circle) curvature at every interior point.
std::vector<CurvatureSample> curvature_profile(const SensorFrame& frame);

}  // namespace sbarom
