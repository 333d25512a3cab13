#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sbarom/sbarom.hpp"

namespace {

using namespace sbarom;

VecX bent(std::size_t n) { return VecX::LinSpaced(static_cast<Eigen::Index>(n), 0.05, 0.4); }

void BM_ForwardKinematics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto chain = build_chain(ActuatorGeometry{}, n);
  const VecX q = bent(n);
  for (auto _ : state) benchmark::DoNotOptimize(joint_positions(chain, q));
}
BENCHMARK(BM_ForwardKinematics)->Arg(5)->Arg(8)->Arg(32);

void BM_MassMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto chain = build_chain(ActuatorGeometry{}, n);
  const VecX q = bent(n);
  for (auto _ : state) benchmark::DoNotOptimize(mass_matrix(chain, q));
}
BENCHMARK(BM_MassMatrix)->Arg(5)->Arg(8)->Arg(32);

void BM_EomAccel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ActuatorGeometry g{};
  const auto chain = build_chain(g, n);
  const auto params = DynamicsParams::uniform(1.6067, 0.008, n);
  const JointState s{bent(n), VecX::Constant(static_cast<Eigen::Index>(n), 0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(eom_accel(chain, params, g, s, 119e3));
}
BENCHMARK(BM_EomAccel)->Arg(5)->Arg(8)->Arg(32);

void BM_SimulatePulse(benchmark::State& state) {
  const ActuatorGeometry g{};
  const auto chain = build_chain(g, 5);
  const auto params = DynamicsParams::uniform(1.6067, 0.008, 5);
  const PressureTrace trace({{0.0, 0.0}, {0.12, 119e3}, {2.88, 0.0}});
  const SimConfig cfg{.t_end = 1.0, .verify_step = state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(chain, params, g, trace, cfg));
}
BENCHMARK(BM_SimulatePulse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

SensorFrame arc(double radius, double sweep, double spacing) {
  SensorFrame f;
  for (double s = 0.0; s <= radius * sweep; s += spacing) {
    const double phi = s / radius;
    f.points.emplace_back(-radius + radius * std::cos(phi), radius * std::sin(phi));
  }
  return f;
}

void BM_SplineDeviation(benchmark::State& state) {
  const auto frame = arc(0.1, 1.7, 0.0008);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const auto seg = segment_frame(frame, n);
    benchmark::DoNotOptimize(max_deviation(spline_through(seg.nodes), frame));
  }
}
BENCHMARK(BM_SplineDeviation)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SelectOrder(benchmark::State& state) {
  std::vector<SensorFrame> frames;
  for (int k = 0; k < 20; ++k) {
    auto f = arc(0.08 + 0.005 * k, 1.5, 0.0008);
    f.time = 0.05 * k;
    frames.push_back(std::move(f));
  }
  for (auto _ : state) benchmark::DoNotOptimize(select_order(frames, 2, 6));
}
BENCHMARK(BM_SelectOrder)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
