#include "sbarom/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbarom/error.hpp"

namespace sbarom {

void SimConfig::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw InvalidInput("simulation needs t_end > t_start");
  }
  if (!std::isfinite(max_step) || max_step <= 0.0) throw InvalidInput("max_step must be > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidInput("tolerances must be > 0");
  if (!std::isfinite(output_rate) || output_rate <= 0.0) throw InvalidInput("output_rate must be > 0");
  if (max_refinements < 0) throw InvalidInput("max_refinements must be >= 0");
}

PressureTrace::PressureTrace(std::vector<Sample> samples) : samples_(std::move(samples)) {
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!std::isfinite(samples_[k].time) || !std::isfinite(samples_[k].pressure)) {
      throw InvalidInput("pressure sample " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(samples_[k].time > samples_[k - 1].time)) {
      throw InvalidInput("pressure timestamps must be strictly increasing (sample " +
                         std::to_string(k) + ")");
    }
  }
}

PressureTrace PressureTrace::pulse(double start, double duration, double pressure) {
  std::vector<Sample> s;
  if (start > 0.0) s.push_back({0.0, 0.0});
  s.push_back({start, pressure});
  s.push_back({start + duration, 0.0});
  return PressureTrace(std::move(s));
}

PressureTrace PressureTrace::constant(double pressure) { return PressureTrace({{0.0, pressure}}); }

double pressure_at(const PressureTrace& trace, double t) {
  const auto& s = trace.samples();
  const auto it = std::upper_bound(s.begin(), s.end(), t,
                                   [](double value, const PressureTrace::Sample& x) { return value < x.time; });
  if (it == s.begin()) return 0.0;
  return std::prev(it)->pressure;
}

namespace {

std::pair<std::size_t, double> bracket(const std::vector<double>& times, double t) {
  if (times.empty()) throw InvalidInput("empty trajectory");
  if (t <= times.front()) return {0, 0.0};
  if (t >= times.back()) return {times.size() - 1, 0.0};
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  return {lo, (t - times[lo]) / (times[hi] - times[lo])};
}

}  // namespace

JointState Trajectory::state_at(double t) const {
  const auto [k, w] = bracket(times, t);
  if (w == 0.0) return states[k];
  return {(1.0 - w) * states[k].q + w * states[k + 1].q,
          (1.0 - w) * states[k].qdot + w * states[k + 1].qdot};
}

std::vector<Vec2> Trajectory::positions_at(double t) const {
  const auto [k, w] = bracket(times, t);
  if (w == 0.0) return joint_positions[k];
  std::vector<Vec2> out(joint_positions[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 - w) * joint_positions[k][i] + w * joint_positions[k + 1][i];
  }
  return out;
}

JointState step(const LinkChain& chain, const DynamicsParams& params,
                const ActuatorGeometry& geometry, const JointState& state, double t, double dt,
                const PressureTrace& trace) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("step size must be > 0");
  if (!state.is_finite()) throw DivergenceError(t);
  const double p = pressure_at(trace, t);

  auto accel = [&](const JointState& s) {
    if (!s.is_finite()) throw DivergenceError(t);
    return eom_accel(chain, params, geometry, s, p);
  };

  const VecX& q = state.q;
  const VecX& v = state.qdot;
  const VecX a1 = accel(state);
  const JointState s2{q + 0.5 * dt * v, v + 0.5 * dt * a1};
  const VecX a2 = accel(s2);
  const JointState s3{q + 0.5 * dt * s2.qdot, v + 0.5 * dt * a2};
  const VecX a3 = accel(s3);
  const JointState s4{q + dt * s3.qdot, v + dt * a3};
  const VecX a4 = accel(s4);

  JointState next{q + dt / 6.0 * (v + 2.0 * s2.qdot + 2.0 * s3.qdot + s4.qdot),
                  v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
  if (!next.is_finite()) throw DivergenceError(t + dt);
  return next;
}

namespace {

std::vector<double> output_times(const SimConfig& config) {
  const double period = 1.0 / config.output_rate;
  const double span = config.t_end - config.t_start;
  const auto count = static_cast<std::size_t>(std::floor(span / period + 1e-9));
  std::vector<double> times;
  times.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) {
    times.push_back(config.t_start + static_cast<double>(k) * period);
  }
  if (config.t_end - times.back() > 1e-12) times.push_back(config.t_end);
  return times;
}

// Output times merged with pressure breakpoints, so that no internal step
// straddles a discontinuity of the input.
std::vector<double> integration_grid(const std::vector<double>& outputs, const PressureTrace& trace) {
  std::vector<double> grid = outputs;
  for (const auto& s : trace.samples()) {
    if (s.time > outputs.front() && s.time < outputs.back()) grid.push_back(s.time);
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> merged;
  for (double t : grid) {
    if (merged.empty() || t - merged.back() > 1e-12) merged.push_back(t);
  }
  return merged;
}

std::vector<JointState> integrate(const LinkChain& chain, const DynamicsParams& params,
                                  const ActuatorGeometry& geometry, const PressureTrace& trace,
                                  const std::vector<double>& outputs, const std::vector<double>& grid,
                                  const JointState& initial, double dt) {
  std::vector<JointState> states;
  states.reserve(outputs.size());
  states.push_back(initial);
  JointState x = initial;
  std::size_t next_output = 1;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double a = grid[g - 1];
    const double b = grid[g];
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(substeps);
    for (std::size_t k = 0; k < substeps; ++k) {
      x = step(chain, params, geometry, x, a + static_cast<double>(k) * h, h, trace);
    }
    if (next_output < outputs.size() && std::abs(outputs[next_output] - b) <= 1e-12) {
      states.push_back(x);
      ++next_output;
    }
  }
  return states;
}

bool within_tolerance(const std::vector<JointState>& coarse, const std::vector<JointState>& fine,
                      const SimConfig& config) {
  // Mixed test per output sample: the largest change of a component group
  // (angles or rates) against the group's magnitude.
  auto close = [&](const VecX& a, const VecX& b) {
    if (a.size() == 0) return true;
    return (a - b).lpNorm<Eigen::Infinity>() <
           config.rel_tol * b.lpNorm<Eigen::Infinity>() + config.abs_tol;
  };
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    if (!close(coarse[k].q, fine[k].q) || !close(coarse[k].qdot, fine[k].qdot)) return false;
  }
  return true;
}

}  // namespace

Trajectory simulate(const LinkChain& chain, const DynamicsParams& params,
                    const ActuatorGeometry& geometry, const PressureTrace& trace,
                    const SimConfig& config, const std::optional<JointState>& initial) {
  config.validate();
  geometry.validate();
  params.validate(chain.size());
  const JointState x0 = initial.value_or(JointState::zero(chain.size()));
  if (x0.size() != chain.size() || static_cast<std::size_t>(x0.qdot.size()) != chain.size()) {
    throw InvalidInput("initial state size does not match chain");
  }
  if (!x0.is_finite()) throw InvalidInput("initial state must be finite");

  const auto outputs = output_times(config);
  const auto grid = integration_grid(outputs, trace);

  double dt = config.max_step;
  auto states = integrate(chain, params, geometry, trace, outputs, grid, x0, dt);
  if (config.verify_step) {
    for (int r = 0; r <= config.max_refinements; ++r) {
      auto finer = integrate(chain, params, geometry, trace, outputs, grid, x0, dt / 2.0);
      const bool ok = within_tolerance(states, finer, config);
      states = std::move(finer);
      dt /= 2.0;
      if (ok) break;
    }
  }

  Trajectory traj;
  traj.times = outputs;
  traj.states = std::move(states);
  traj.joint_positions.reserve(traj.times.size());
  for (const auto& s : traj.states) traj.joint_positions.push_back(joint_positions(chain, s.q));
  return traj;
}

double dominant_frequency(const std::vector<double>& times, const std::vector<double>& values,
                          std::pair<double, double> window) {
  if (times.size() != values.size()) throw InvalidInput("times and values differ in length");
  std::vector<double> t;
  std::vector<double> x;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= window.first && times[k] <= window.second) {
      t.push_back(times[k]);
      x.push_back(values[k]);
    }
  }
  if (t.size() < 5) throw InsufficientData("too few samples in the frequency window");

  const std::size_t tail = std::max<std::size_t>(1, t.size() / 5);
  double steady = 0.0;
  for (std::size_t k = t.size() - tail; k < t.size(); ++k) steady += x[k];
  steady /= static_cast<double>(tail);

  std::vector<double> crossings;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double a = x[k - 1] - steady;
    const double b = x[k] - steady;
    if (a < 0.0 && b >= 0.0) {
      crossings.push_back(t[k - 1] + (t[k] - t[k - 1]) * (-a) / (b - a));
    }
  }
  if (crossings.size() < 2) {
    throw InsufficientData("fewer than two oscillation periods in the frequency window");
  }
  return static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

double dominant_frequency(const Trajectory& trajectory, std::size_t joint,
                          std::pair<double, double> window) {
  if (joint >= trajectory.links()) throw InvalidInput("joint index out of range");
  std::vector<double> values;
  values.reserve(trajectory.size());
  for (const auto& s : trajectory.states) values.push_back(s.q[static_cast<Eigen::Index>(joint)]);
  return dominant_frequency(trajectory.times, values, window);
}

}  // namespace sbarom
