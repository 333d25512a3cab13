#pragma once

// Fitting joint stiffness and damping to measured shape sequences by
// derivative-free simplex search over simulation-vs-measurement error.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sbarom/dynamics.hpp"
#include "sbarom/integrator.hpp"
#include "sbarom/reconstruction.hpp"

namespace sbarom {

inline constexpr double kDivergencePenalty = 1e6;  // m

struct ObjectiveValue {
  double rms = 0.0;  // m, or kDivergencePenalty when the simulation diverged
  bool diverged = false;
};

/// RMS distance between simulated joints 1..n and the segmented frame nodes,
/// over all frames. The simulation spans [config.t_start, last frame time];
/// states are linearly interpolated to frame times.
ObjectiveValue objective(const DynamicsParams& params, const LinkChain& chain,
                         const ActuatorGeometry& geometry, std::span<const SensorFrame> frames,
                         const PressureTrace& trace, const SimConfig& config);

struct ParamBounds {
  double k_b_min = 0.0;
  double k_b_max = 0.0;
  double damping_min = 0.0;
  double damping_max = 0.0;

  /// [init / 10, init * 10] for both parameters.
  static ParamBounds around(const DynamicsParams& init);
  void validate() const;
  bool contains(const DynamicsParams& p) const;
};

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.05;  // fraction of each bound width
  double tolerance = 1e-6;     // simplex diameter, in bound-normalised units
};

struct IdentifyOptions {
  std::size_t budget = 200;         // objective evaluations
  bool per_joint_damping = false;   // n + 1 free variables instead of 2
  NelderMeadOptions simplex{};
  SimConfig sim{.t_start = 0.0, .t_end = 1.0, .max_step = 1e-4, .rel_tol = 1e-6,
                .abs_tol = 1e-9, .output_rate = 1000.0, .verify_step = false};
};

struct IdentifyResult {
  DynamicsParams params;
  ObjectiveValue value;
  std::vector<double> best_so_far;  // one entry per evaluation
  std::size_t evaluations = 0;
  bool converged = false;           // simplex collapsed below tolerance
};

/// Minimises f over the box [lower, upper] with Nelder-Mead, projecting every
/// trial point onto the box. Exposed for testing the search independently of
/// the simulator.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> best_so_far;
  std::size_t evaluations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> init, const std::vector<double>& lower,
                          const std::vector<double>& upper, std::size_t budget,
                          const NelderMeadOptions& options = {});

IdentifyResult identify(const LinkChain& chain, const ActuatorGeometry& geometry,
                        std::span<const SensorFrame> frames, const PressureTrace& trace,
                        const DynamicsParams& init, const ParamBounds& bounds,
                        const IdentifyOptions& options = {});

}  // namespace sbarom
