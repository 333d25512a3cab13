#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sbarom/dynamics.hpp"
#include "sbarom/kinematics.hpp"

namespace sbarom {

struct SimConfig {
  double t_start = 0.0;       // s
  double t_end = 1.0;         // s
  double max_step = 1e-4;     // s, largest internal RK4 step
  double rel_tol = 1e-6;      // step-halving acceptance, relative
  double abs_tol = 1e-9;      // step-halving acceptance, absolute floor
  double output_rate = 1000;  // Hz
  /// Halve the internal step until a further halving changes every output
  /// sample by less than rel_tol * |x| + abs_tol. When false, integrate once
  /// at max_step.
  bool verify_step = true;
  int max_refinements = 4;

  void validate() const;
};

/// (time, pressure) samples held constant between timestamps.
class PressureTrace {
 public:
  struct Sample {
    double time;
    double pressure;
  };

  PressureTrace() = default;
  /// Throws InvalidInput unless times are strictly increasing and values finite.
  explicit PressureTrace(std::vector<Sample> samples);

  /// Rectangular pulse: 0 before `start`, `pressure` on [start, start + duration), 0 after.
  static PressureTrace pulse(double start, double duration, double pressure);
  static PressureTrace constant(double pressure);

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  bool empty() const noexcept { return samples_.empty(); }

 private:
  std::vector<Sample> samples_;
};

/// Zero-order hold; 0 before the first sample.
double pressure_at(const PressureTrace& trace, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<JointState> states;
  std::vector<std::vector<Vec2>> joint_positions;  // n + 1 points per sample

  std::size_t size() const noexcept { return times.size(); }
  std::size_t links() const { return states.empty() ? 0 : states.front().size(); }
  /// Linear interpolation of the state at time t (clamped to the sampled span).
  JointState state_at(double t) const;
  /// Linear interpolation of the stored joint positions at time t.
  std::vector<Vec2> positions_at(double t) const;
};

/// One classic RK4 step of (q, qdot). Pressure is held at its value at t for
/// the whole step. Throws DivergenceError if the result is not finite.
JointState step(const LinkChain& chain, const DynamicsParams& params,
                const ActuatorGeometry& geometry, const JointState& state, double t, double dt,
                const PressureTrace& trace);

/// Integrates from rest (or `initial`) and samples at config.output_rate.
/// Internal steps are aligned with pressure breakpoints and output times.
Trajectory simulate(const LinkChain& chain, const DynamicsParams& params,
                    const ActuatorGeometry& geometry, const PressureTrace& trace,
                    const SimConfig& config, const std::optional<JointState>& initial = std::nullopt);

/// Oscillation frequency of joint `joint` inside [window.first, window.second],
/// from the mean spacing of upward zero crossings after removing the
/// steady-state value (mean of the last fifth of the window).
double dominant_frequency(const Trajectory& trajectory, std::size_t joint,
                          std::pair<double, double> window);

/// Same estimate for a bare sampled signal.
double dominant_frequency(const std::vector<double>& times, const std::vector<double>& values,
                          std::pair<double, double> window);

}  // namespace sbarom
