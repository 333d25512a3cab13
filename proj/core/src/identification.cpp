#include "sbarom/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sbarom/error.hpp"

namespace sbarom {

namespace {

struct MeasuredNodes {
  std::vector<double> times;
  std::vector<std::vector<Vec2>> nodes;  // n + 1 per frame, node 0 is the base
};

MeasuredNodes measure(std::span<const SensorFrame> frames, std::size_t n) {
  if (frames.empty()) throw InvalidInput("identification needs at least one frame");
  MeasuredNodes m;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (k > 0 && !(frames[k].time > frames[k - 1].time)) {
      throw InvalidInput("frame times must be strictly increasing");
    }
    m.times.push_back(frames[k].time);
    m.nodes.push_back(segment_frame(frames[k], n).nodes);
  }
  return m;
}

ObjectiveValue evaluate(const DynamicsParams& params, const LinkChain& chain,
                        const ActuatorGeometry& geometry, const MeasuredNodes& measured,
                        const PressureTrace& trace, SimConfig config) {
  if (measured.times.front() < config.t_start) {
    throw InvalidInput("frames start before the simulation start time");
  }
  config.t_end = std::max(measured.times.back(), config.t_start + 1.0 / config.output_rate);

  Trajectory traj;
  try {
    traj = simulate(chain, params, geometry, trace, config);
  } catch (const DivergenceError&) {
    return {kDivergencePenalty, true};
  }

  const std::size_t n = chain.size();
  double sum = 0.0;
  for (std::size_t f = 0; f < measured.times.size(); ++f) {
    const auto sim = joint_positions(chain, traj.state_at(measured.times[f]).q);
    for (std::size_t i = 1; i <= n; ++i) sum += (sim[i] - measured.nodes[f][i]).squaredNorm();
  }
  const double rms = std::sqrt(sum / static_cast<double>(measured.times.size() * n));
  if (!std::isfinite(rms)) return {kDivergencePenalty, true};
  return {rms, false};
}

}  // namespace

ObjectiveValue objective(const DynamicsParams& params, const LinkChain& chain,
                         const ActuatorGeometry& geometry, std::span<const SensorFrame> frames,
                         const PressureTrace& trace, const SimConfig& config) {
  return evaluate(params, chain, geometry, measure(frames, chain.size()), trace, config);
}

ParamBounds ParamBounds::around(const DynamicsParams& init) {
  const double d = init.damping.empty()
                       ? 0.0
                       : *std::max_element(init.damping.begin(), init.damping.end());
  return {init.k_b / 10.0, init.k_b * 10.0, d / 10.0, d * 10.0};
}

void ParamBounds::validate() const {
  if (!(k_b_min > 0.0) || !(k_b_max > k_b_min) || !std::isfinite(k_b_max)) {
    throw InvalidInput("k_b bounds must satisfy 0 < min < max");
  }
  if (!(damping_min >= 0.0) || !(damping_max > damping_min) || !std::isfinite(damping_max)) {
    throw InvalidInput("damping bounds must satisfy 0 <= min < max");
  }
}

bool ParamBounds::contains(const DynamicsParams& p) const {
  if (p.k_b < k_b_min || p.k_b > k_b_max) return false;
  return std::all_of(p.damping.begin(), p.damping.end(),
                     [&](double d) { return d >= damping_min && d <= damping_max; });
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> init, const std::vector<double>& lower,
                          const std::vector<double>& upper, std::size_t budget,
                          const NelderMeadOptions& options) {
  const std::size_t dim = init.size();
  if (dim == 0) throw InvalidInput("nelder_mead needs at least one variable");
  if (lower.size() != dim || upper.size() != dim) throw InvalidInput("bounds dimension mismatch");
  if (budget < 1) throw InvalidInput("evaluation budget must be >= 1");
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(lower[i] < upper[i])) throw InvalidInput("lower bound must be below upper bound");
    if (init[i] < lower[i] || init[i] > upper[i]) throw InvalidInput("initial point outside bounds");
  }

  using Point = std::vector<double>;
  SimplexResult result;
  result.x = init;
  result.value = std::numeric_limits<double>::infinity();

  auto project = [&](Point x) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  };
  // Every evaluation goes through here; returns false once the budget is spent.
  auto eval = [&](const Point& x, double& value) {
    if (result.evaluations >= budget) return false;
    value = f(x);
    ++result.evaluations;
    if (value < result.value) {
      result.value = value;
      result.x = x;
    }
    result.best_so_far.push_back(result.value);
    return true;
  };
  auto combine = [&](const Point& a, const Point& b, double t) {
    // a + t * (b - a)
    Point out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return project(std::move(out));
  };

  std::vector<Point> simplex{init};
  std::vector<double> values(1);
  if (!eval(init, values[0])) return result;
  for (std::size_t i = 0; i < dim; ++i) {
    Point x = init;
    const double step = options.initial_step * (upper[i] - lower[i]);
    x[i] = (x[i] + step <= upper[i]) ? x[i] + step : x[i] - step;
    double v;
    if (!eval(x, v)) return result;
    simplex.push_back(std::move(x));
    values.push_back(v);
  }

  std::vector<std::size_t> order(dim + 1);
  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double diameter = 0.0;
    for (const auto& x : simplex) {
      for (std::size_t i = 0; i < dim; ++i) {
        diameter = std::max(diameter, std::abs(x[i] - simplex[best][i]) / (upper[i] - lower[i]));
      }
    }
    if (diameter < options.tolerance) {
      result.converged = true;
      return result;
    }

    Point centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[order[k]][i];
    }
    for (auto& c : centroid) c /= static_cast<double>(dim);

    const Point reflected = combine(centroid, simplex[worst], -options.reflection);
    double fr;
    if (!eval(reflected, fr)) return result;

    if (fr < values[best]) {
      const Point expanded = combine(centroid, reflected, options.expansion);
      double fe;
      if (!eval(expanded, fe)) return result;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }

    const bool outside = fr < values[worst];
    const Point contracted = outside ? combine(centroid, reflected, options.contraction)
                                     : combine(centroid, simplex[worst], options.contraction);
    double fc;
    if (!eval(contracted, fc)) return result;
    if (outside ? fc <= fr : fc < values[worst]) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }

    for (std::size_t k = 1; k <= dim; ++k) {
      const std::size_t idx = order[k];
      simplex[idx] = combine(simplex[best], simplex[idx], options.shrink);
      if (!eval(simplex[idx], values[idx])) return result;
    }
  }
}

IdentifyResult identify(const LinkChain& chain, const ActuatorGeometry& geometry,
                        std::span<const SensorFrame> frames, const PressureTrace& trace,
                        const DynamicsParams& init, const ParamBounds& bounds,
                        const IdentifyOptions& options) {
  const std::size_t n = chain.size();
  init.validate(n);
  bounds.validate();
  if (!bounds.contains(init)) throw InvalidInput("initial parameters lie outside the bounds");
  if (options.budget < 1) throw InvalidInput("evaluation budget must be >= 1");
  const MeasuredNodes measured = measure(frames, n);

  const std::size_t dim = options.per_joint_damping ? n + 1 : 2;
  std::vector<double> lower(dim, bounds.damping_min);
  std::vector<double> upper(dim, bounds.damping_max);
  lower[0] = bounds.k_b_min;
  upper[0] = bounds.k_b_max;

  std::vector<double> x0(dim);
  x0[0] = init.k_b;
  if (options.per_joint_damping) {
    std::copy(init.damping.begin(), init.damping.end(), x0.begin() + 1);
  } else {
    // Shared damping starts from the mean of the supplied per-joint values.
    const bool shared = std::all_of(init.damping.begin(), init.damping.end(),
                                    [&](double d) { return d == init.damping.front(); });
    x0[1] = shared ? init.damping.front()
                   : std::accumulate(init.damping.begin(), init.damping.end(), 0.0) / static_cast<double>(n);
  }

  auto to_params = [&](const std::vector<double>& x) {
    DynamicsParams p;
    p.k_b = x[0];
    if (options.per_joint_damping) {
      p.damping.assign(x.begin() + 1, x.end());
    } else {
      p.damping.assign(n, x[1]);
    }
    return p;
  };

  // Search in bound-normalised coordinates so both parameters move on the same scale.
  std::vector<double> u0(dim), zeros(dim, 0.0), ones(dim, 1.0);
  for (std::size_t i = 0; i < dim; ++i) u0[i] = (x0[i] - lower[i]) / (upper[i] - lower[i]);
  auto denormalise = [&](const std::vector<double>& u) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = std::clamp(lower[i] + u[i] * (upper[i] - lower[i]), lower[i], upper[i]);
    }
    // The initial vertex maps back to the exact initial parameters.
    if (u == u0) x = x0;
    return x;
  };

  bool best_diverged = false;
  double best_value = std::numeric_limits<double>::infinity();
  auto f = [&](const std::vector<double>& u) {
    const auto v = evaluate(to_params(denormalise(u)), chain, geometry, measured, trace, options.sim);
    if (v.rms < best_value) {
      best_value = v.rms;
      best_diverged = v.diverged;
    }
    return v.rms;
  };

  const auto sr = nelder_mead(f, u0, zeros, ones, options.budget, options.simplex);

  IdentifyResult result;
  result.params = to_params(denormalise(sr.x));
  result.value = {sr.value, best_diverged};
  result.best_so_far = sr.best_so_far;
  result.evaluations = sr.evaluations;
  result.converged = sr.converged;
  return result;
}

}  // namespace sbarom
