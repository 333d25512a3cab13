#include "sbarom/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "sbarom/error.hpp"

namespace sbarom {

namespace {

constexpr double kDenseStep = 1e-4;        // m, coarse nearest-point scan
constexpr double kRefineTolerance = 1e-10;  // m, ternary-search bracket width

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

void SensorFrame::validate(std::size_t min_points) const {
  if (!std::isfinite(time) || time < 0.0) throw InvalidInput("frame time must be finite and >= 0");
  if (points.size() < min_points) {
    throw InvalidInput("frame at t=" + std::to_string(time) + " has " +
                       std::to_string(points.size()) + " points, need at least " +
                       std::to_string(min_points));
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].allFinite()) throw InvalidInput("frame point " + std::to_string(k) + " is not finite");
    if (k > 0 && points[k] == points[k - 1]) {
      throw InvalidInput("frame points " + std::to_string(k - 1) + " and " + std::to_string(k) +
                         " coincide");
    }
  }
}

Segmentation segment_frame(const SensorFrame& frame, std::size_t n) {
  frame.validate();
  const std::size_t count = frame.points.size();
  if (n < 1) throw InvalidInput("link count must be >= 1");
  if (n + 1 > count) {
    throw InvalidInput("cannot place " + std::to_string(n + 1) + " nodes on a frame of " +
                       std::to_string(count) + " points");
  }

  const auto s = cumulative_chord(frame.points);
  const double total = s.back();

  Segmentation seg;
  seg.indices.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    std::size_t idx;
    if (i == 0) {
      idx = 0;
    } else if (i == n) {
      idx = count - 1;
    } else {
      const double target = total * static_cast<double>(i) / static_cast<double>(n);
      const auto it = std::lower_bound(s.begin(), s.end(), target);
      idx = static_cast<std::size_t>(it - s.begin());
      // Ties go to the lower index.
      if (idx > 0 && (idx == count || target - s[idx - 1] <= s[idx] - target)) --idx;
      // Keep nodes strictly ordered and leave room for the remaining ones.
      const std::size_t lo = seg.indices.back() + 1;
      const std::size_t hi = count - 1 - (n - i);
      idx = std::clamp(idx, lo, hi);
    }
    seg.indices.push_back(idx);
  }
  seg.nodes.reserve(n + 1);
  for (auto idx : seg.indices) seg.nodes.push_back(frame.points[idx]);
  return seg;
}

std::vector<double> chord_headings(std::span<const Vec2> nodes) {
  std::vector<double> headings;
  headings.reserve(nodes.size() > 0 ? nodes.size() - 1 : 0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Vec2 d = nodes[i] - nodes[i - 1];
    if (d.norm() == 0.0) {
      throw InvalidInput("nodes " + std::to_string(i - 1) + " and " + std::to_string(i) +
                         " coincide");
    }
    // Direction R(phi) * (0, 1) = (-sin phi, cos phi).
    headings.push_back(std::atan2(-d.x(), d.y()));
  }
  return headings;
}

LinkChain fit_reference_chain(const SensorFrame& reference, std::size_t n) {
  const auto seg = segment_frame(reference, n);
  const auto headings = chord_headings(seg.nodes);
  std::vector<LinkParams> links(n);
  double prev_heading = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    links[i].length = (seg.nodes[i + 1] - seg.nodes[i]).norm();
    links[i].offset = wrap_angle(headings[i] - prev_heading);
    links[i].com_distance = links[i].length / 2.0;
    prev_heading = headings[i];
  }
  return LinkChain(std::move(links));
}

VecX frame_to_joint_angles(const SensorFrame& frame, const LinkChain& chain) {
  const std::size_t n = chain.size();
  const auto seg = segment_frame(frame, n);
  const auto headings = chord_headings(seg.nodes);
  VecX q(static_cast<Eigen::Index>(n));
  double prev_heading = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q[static_cast<Eigen::Index>(i)] = wrap_angle(headings[i] - prev_heading - chain[i].offset);
    prev_heading = headings[i];
  }
  return q;
}

namespace {

// Dense samples of a curve, shared by every point of one frame.
struct CurveSamples {
  std::vector<double> s;
  std::vector<Vec2> p;
};

CurveSamples sample_curve(const SplineCurve& curve) {
  const double span = curve.end() - curve.start();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / kDenseStep)));
  CurveSamples out;
  out.s.resize(steps + 1);
  out.p.resize(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    out.s[j] = (j == steps) ? curve.end()
                            : curve.start() + span * static_cast<double>(j) / static_cast<double>(steps);
    out.p[j] = curve(out.s[j]);
  }
  return out;
}

double nearest_distance(const SplineCurve& curve, const CurveSamples& samples, const Vec2& point) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < samples.p.size(); ++j) {
    const double d2 = (samples.p[j] - point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  double lo = samples.s[best > 0 ? best - 1 : 0];
  double hi = samples.s[std::min(best + 1, samples.s.size() - 1)];
  auto dist2 = [&](double s) { return (curve(s) - point).squaredNorm(); };
  while (hi - lo > kRefineTolerance) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (dist2(m1) <= dist2(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double refined = dist2(0.5 * (lo + hi));
  return std::sqrt(std::min(refined, best_d2));
}

}  // namespace

Deviation max_deviation(const SplineCurve& curve, const SensorFrame& frame) {
  if (frame.points.empty()) return {};
  const auto samples = sample_curve(curve);
  Deviation dev;
  double sum = 0.0;
  for (const auto& p : frame.points) {
    const double d = nearest_distance(curve, samples, p);
    dev.max = std::max(dev.max, d);
    sum += d;
  }
  dev.mean = sum / static_cast<double>(frame.points.size());
  return dev;
}

namespace {

CandidateReport evaluate_candidate(std::span<const SensorFrame> frames, std::size_t n) {
  CandidateReport rep;
  rep.n = n;
  rep.frame_max.reserve(frames.size());
  rep.frame_mean.reserve(frames.size());
  double sum = 0.0;
  for (const auto& frame : frames) {
    const auto seg = segment_frame(frame, n);
    const auto dev = max_deviation(spline_through(seg.nodes), frame);
    rep.frame_max.push_back(dev.max);
    rep.frame_mean.push_back(dev.mean);
    rep.max_error = std::max(rep.max_error, dev.max);
    sum += dev.max;
  }
  rep.mean_error = sum / static_cast<double>(frames.size());
  return rep;
}

}  // namespace

OrderSelectionReport select_order(std::span<const SensorFrame> frames, std::size_t n_min,
                                  std::size_t n_max, double threshold) {
  if (frames.empty()) throw InvalidInput("order selection needs at least one frame");
  if (n_min < 2) throw InvalidInput("order selection needs n >= 2 (a spline needs 3 nodes)");
  if (n_min > n_max) throw InvalidInput("empty link-count range");
  if (!std::isfinite(threshold) || threshold <= 0.0) throw InvalidInput("threshold must be > 0");
  for (const auto& f : frames) {
    f.validate();
    if (f.points.size() < n_max + 1) {
      throw InvalidInput("frame at t=" + std::to_string(f.time) + " cannot hold " +
                         std::to_string(n_max) + " links");
    }
  }

  OrderSelectionReport report;
  report.threshold = threshold;
  for (const auto& f : frames) report.times.push_back(f.time);

  // Candidates are independent; each is computed by exactly the same sequence
  // of operations regardless of scheduling.
  std::vector<std::future<CandidateReport>> jobs;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    jobs.push_back(std::async(std::launch::async, evaluate_candidate, frames, n));
  }
  for (auto& job : jobs) report.candidates.push_back(job.get());

  const CandidateReport* best = &report.candidates.front();
  for (const auto& c : report.candidates) {
    if (c.max_error < threshold) {
      report.chosen_n = c.n;
      report.threshold_met = true;
      return report;
    }
    if (c.max_error < best->max_error) best = &c;
  }
  report.chosen_n = best->n;
  report.threshold_met = false;
  return report;
}

std::vector<CurvatureSample> curvature_profile(const SensorFrame& frame) {
  frame.validate(5);
  const auto s = cumulative_chord(frame.points);
  std::vector<CurvatureSample> out;
  out.reserve(frame.points.size() - 2);
  for (std::size_t k = 1; k + 1 < frame.points.size(); ++k) {
    const Vec2& a = frame.points[k - 1];
    const Vec2& b = frame.points[k];
    const Vec2& c = frame.points[k + 1];
    const double ab = (b - a).norm();
    const double bc = (c - b).norm();
    const double ca = (a - c).norm();
    // 1/R of the circumscribed circle: 4 * area / (ab * bc * ca).
    const double twice_area = cross(b - a, c - b);
    const double kappa = (ca == 0.0) ? 0.0 : 2.0 * twice_area / (ab * bc * ca);
    out.push_back({s[k], kappa});
  }
  return out;
}

}  // namespace sbarom
