#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "sbarom/error.hpp"
#include "sbarom/integrator.hpp"

namespace sbarom {
namespace {

using std::numbers::pi;

PressureTrace nominal_pulse() { return PressureTrace({{0.0, 0.0}, {0.12, 119e3}, {2.88, 0.0}}); }

SimConfig fixed_step(double t_end, double dt, double rate = 1000.0) {
  return SimConfig{.t_end = t_end, .max_step = dt, .output_rate = rate, .verify_step = false};
}

JointState run_fixed(const LinkChain& chain, const DynamicsParams& p, const JointState& x0, double t_end,
                     double dt) {
  JointState x = x0;
  const auto steps = static_cast<int>(std::lround(t_end / dt));
  const PressureTrace none;
  for (int k = 0; k < steps; ++k) x = step(chain, p, ActuatorGeometry{}, x, k * dt, dt, none);
  return x;
}

TEST(SimConfig, Validation) {
  EXPECT_NO_THROW(SimConfig{}.validate());
  EXPECT_THROW((SimConfig{.t_start = 1.0, .t_end = 1.0}.validate()), InvalidInput);
  EXPECT_THROW((SimConfig{.max_step = 0.0}.validate()), InvalidInput);
  EXPECT_THROW((SimConfig{.rel_tol = 0.0}.validate()), InvalidInput);
  EXPECT_THROW((SimConfig{.abs_tol = -1.0}.validate()), InvalidInput);
  EXPECT_THROW((SimConfig{.output_rate = 0.0}.validate()), InvalidInput);
}

TEST(PressureTrace, Validation) {
  EXPECT_THROW(PressureTrace({{0.0, 0.0}, {0.0, 1.0}}), InvalidInput);
  EXPECT_THROW(PressureTrace({{0.1, 0.0}, {0.0, 1.0}}), InvalidInput);
  EXPECT_THROW(PressureTrace({{0.0, std::nan("")}}), InvalidInput);
}

TEST(PressureAt, ZeroOrderHold) {
  const auto trace = nominal_pulse();
  EXPECT_EQ(pressure_at(trace, 1.0), 119e3);
  EXPECT_EQ(pressure_at(trace, 0.05), 0.0);
  EXPECT_EQ(pressure_at(trace, 3.5), 0.0);
  EXPECT_EQ(pressure_at(trace, 0.12), 119e3);
  EXPECT_EQ(pressure_at(trace, 2.88), 0.0);
  EXPECT_EQ(pressure_at(PressureTrace({{1.0, 5.0}}), 0.5), 0.0);
  EXPECT_EQ(pressure_at(PressureTrace({{1.0, 5.0}}), 9.0), 5.0);
  EXPECT_EQ(pressure_at(PressureTrace{}, 1.0), 0.0);

  const auto pulse = PressureTrace::pulse(0.12, 2.76, 119e3);
  for (double t : {0.0, 0.05, 0.12, 1.0, 2.879, 2.88, 3.5}) EXPECT_EQ(pressure_at(pulse, t), pressure_at(trace, t));
  EXPECT_EQ(pressure_at(PressureTrace::constant(7.0), 100.0), 7.0);
}

TEST(Step, ZeroStateZeroPressureIsUnchanged) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto next = step(chain, testing::nominal_params(), ActuatorGeometry{}, JointState::zero(5), 0.0, 1e-4,
                         PressureTrace{});
  EXPECT_EQ(next.q, VecX::Zero(5));
  EXPECT_EQ(next.qdot, VecX::Zero(5));
  EXPECT_THROW(step(chain, testing::nominal_params(), ActuatorGeometry{}, JointState::zero(5), 0.0, 0.0,
                    PressureTrace{}),
               InvalidInput);
}

TEST(Step, FourthOrderConvergenceOnSingleRod) {
  const auto rod = build_chain(ActuatorGeometry{}, 1);
  const auto p = DynamicsParams::uniform(1.6067, 0.0, 1);
  const JointState x0{VecX::Constant(1, 0.1), VecX::Zero(1)};
  const double t_end = 1.0;
  const double a = run_fixed(rod, p, x0, t_end, 2e-3).q[0];
  const double b = run_fixed(rod, p, x0, t_end, 1e-3).q[0];
  const double c = run_fixed(rod, p, x0, t_end, 5e-4).q[0];
  const double ratio = (a - b) / (b - c);
  EXPECT_NEAR(ratio, 16.0, 16.0 * 0.2);

  // Global error against a dt / 10 reference.
  const double ref = run_fixed(rod, p, x0, t_end, 1e-4).q[0];
  EXPECT_NEAR((a - ref) / (b - ref), 16.0, 16.0 * 0.2);
}

TEST(Step, LocalErrorIsFifthOrder) {
  const auto rod = build_chain(ActuatorGeometry{}, 1);
  const auto p = DynamicsParams::uniform(1.6067, 0.0, 1);
  const JointState x0{VecX::Constant(1, 0.1), VecX::Zero(1)};
  auto defect = [&](double dt) {
    const JointState full = run_fixed(rod, p, x0, dt, dt);
    const JointState half = run_fixed(rod, p, x0, dt, dt / 2.0);
    return std::hypot(full.q[0] - half.q[0], full.qdot[0] - half.qdot[0]);
  };
  EXPECT_NEAR(defect(4e-3) / defect(2e-3), 32.0, 32.0 * 0.2);
}

TEST(Step, DivergenceNamesTime) {
  const auto rod = build_chain(ActuatorGeometry{}, 2);
  const auto p = DynamicsParams::uniform(1e12, 0.0, 2);
  try {
    simulate(rod, p, ActuatorGeometry{}, PressureTrace::constant(1e5), fixed_step(1.0, 1e-2, 100.0));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LE(e.time(), 1.0);
  }
}

TEST(Simulate, ZeroPressureStaysAtRest) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto traj = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, PressureTrace::constant(0.0),
                             fixed_step(1.0, 1e-4));
  ASSERT_EQ(traj.size(), 1001u);
  for (const auto& s : traj.states) {
    EXPECT_EQ(s.q.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.qdot.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Simulate, OutputGridAndStoredPositions) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto traj = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, nominal_pulse(),
                             fixed_step(0.4555, 1e-4, 100.0));
  ASSERT_EQ(traj.times.size(), traj.states.size());
  ASSERT_EQ(traj.times.size(), traj.joint_positions.size());
  EXPECT_DOUBLE_EQ(traj.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(traj.times.back(), 0.4555);
  for (std::size_t k = 1; k < traj.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto fk = joint_positions(chain, traj.states[k].q);
    ASSERT_EQ(traj.joint_positions[k].size(), 6u);
    for (std::size_t i = 0; i < fk.size(); ++i) EXPECT_LE((fk[i] - traj.joint_positions[k][i]).norm(), 1e-12);
  }
  EXPECT_EQ(traj.links(), 5u);
}

TEST(Simulate, Deterministic) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  SimConfig cfg{.t_end = 0.5};
  const auto a = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, nominal_pulse(), cfg);
  const auto b = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, nominal_pulse(), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.states[k].q, b.states[k].q);
    EXPECT_EQ(a.states[k].qdot, b.states[k].qdot);
  }
}

TEST(Simulate, RejectsBadInitialState) {
  const auto chain = build_chain(ActuatorGeometry{}, 3);
  EXPECT_THROW(simulate(chain, testing::nominal_params(3), ActuatorGeometry{}, PressureTrace{}, SimConfig{},
                        JointState::zero(2)),
               InvalidInput);
  EXPECT_THROW(simulate(chain, testing::nominal_params(5), ActuatorGeometry{}, PressureTrace{}, SimConfig{}),
               InvalidInput);
}

TEST(Simulate, StepHalvingConservesEnergyWhenUndamped) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto p = DynamicsParams::uniform(1.6067, 0.0, 5);
  std::mt19937 rng(61);
  const JointState x0{testing::random_vector(rng, 5, -0.3, 0.3), testing::random_vector(rng, 5, -1.0, 1.0)};
  const auto traj = simulate(chain, p, ActuatorGeometry{}, PressureTrace{}, SimConfig{.t_end = 1.0}, x0);
  const double e0 = total_energy(chain, p, x0);
  double worst = 0.0;
  for (const auto& s : traj.states) worst = std::max(worst, std::abs(total_energy(chain, p, s) - e0) / e0);
  EXPECT_LT(worst, 1e-6);
}

TEST(Step, FixedStepEnergyDriftShrinksWithStep) {
  // Bare RK4 drift on the stiffest mode of the 5-link chain; halving the step
  // must cut it by roughly the fourth power.
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto p = DynamicsParams::uniform(1.6067, 0.0, 5);
  std::mt19937 rng(67);
  const JointState x0{testing::random_vector(rng, 5, -0.3, 0.3), VecX::Zero(5)};
  const double e0 = total_energy(chain, p, x0);
  auto drift = [&](double dt) { return std::abs(total_energy(chain, p, run_fixed(chain, p, x0, 1.0, dt)) - e0) / e0; };
  const double coarse = drift(1e-4);
  const double fine = drift(5e-5);
  const double finer = drift(2.5e-5);
  EXPECT_GT(coarse / fine, 10.0);
  EXPECT_GT(fine / finer, 10.0);
  EXPECT_LT(finer, 1e-5);
}

TEST(Simulate, PassiveWhenDamped) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto p = testing::nominal_params();
  std::mt19937 rng(71);
  const JointState x0{testing::random_vector(rng, 5, -0.3, 0.3), testing::random_vector(rng, 5, -1.0, 1.0)};
  const auto traj = simulate(chain, p, ActuatorGeometry{}, PressureTrace{}, SimConfig{.t_end = 1.0}, x0);
  double prev = total_energy(chain, p, traj.states.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double e = total_energy(chain, p, traj.states[k]);
    EXPECT_LE(e, prev) << "t = " << traj.times[k];
    prev = e;
  }
}

TEST(Simulate, ConstantPressureReachesStaticEquilibrium) {
  const ActuatorGeometry g{};
  const auto chain = build_chain(g, 5);
  const auto p = testing::nominal_params();
  const auto traj = simulate(chain, p, g, PressureTrace::constant(119e3), fixed_step(6.0, 1e-4, 100.0));
  const double target = pressure_torque(g, 119e3) / p.k_b;
  const auto& last = traj.states.back();
  EXPECT_LT((last.q - VecX::Constant(5, target)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Simulate, SettlesBeforePulseRelease) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto traj = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, nominal_pulse(),
                             fixed_step(2.88, 1e-4, 100.0));
  EXPECT_LT(traj.states.back().qdot.cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Trajectory, InterpolationAndClamping) {
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {{VecX::Constant(1, 0.0), VecX::Constant(1, 2.0)}, {VecX::Constant(1, 1.0), VecX::Constant(1, 4.0)}};
  t.joint_positions = {{Vec2(0, 0), Vec2(0, 1)}, {Vec2(0, 0), Vec2(1, 0)}};
  EXPECT_DOUBLE_EQ(t.state_at(0.25).q[0], 0.25);
  EXPECT_DOUBLE_EQ(t.state_at(0.25).qdot[0], 2.5);
  EXPECT_DOUBLE_EQ(t.state_at(-1.0).q[0], 0.0);
  EXPECT_DOUBLE_EQ(t.state_at(5.0).q[0], 1.0);
  EXPECT_EQ(t.positions_at(0.5)[1], Vec2(0.5, 0.5));
  EXPECT_THROW(Trajectory{}.state_at(0.0), InvalidInput);
}

TEST(DominantFrequency, DecayingSine) {
  std::vector<double> t, x;
  for (int k = 0; k <= 3000; ++k) {
    t.push_back(k * 1e-3);
    x.push_back(std::exp(-t.back()) * std::sin(2.0 * pi * 5.0 * t.back()));
  }
  EXPECT_NEAR(dominant_frequency(t, x, {0.0, 3.0}), 5.0, 0.05);
}

TEST(DominantFrequency, InsufficientData) {
  std::vector<double> t, x;
  for (int k = 0; k <= 1000; ++k) {
    t.push_back(k * 1e-3);
    x.push_back(0.3);
  }
  EXPECT_THROW(dominant_frequency(t, x, {0.0, 1.0}), InsufficientData);
  EXPECT_THROW(dominant_frequency(t, x, {5.0, 6.0}), InsufficientData);
  EXPECT_THROW(dominant_frequency(t, std::vector<double>{1.0}, {0.0, 1.0}), InvalidInput);
}

TEST(DominantFrequency, SingleRodMatchesDampedOscillator) {
  const ActuatorGeometry g{};
  const auto rod = build_chain(g, 1);
  const double d = 0.002;
  const auto p = DynamicsParams::uniform(1.6067, d, 1);
  const auto traj = simulate(rod, p, g, PressureTrace::constant(119e3), SimConfig{.t_end = 2.0});
  const double m = rod[0].mass * rod[0].length * rod[0].length / 3.0;
  const double expected = std::sqrt(p.k_b / m - std::pow(d / (2.0 * m), 2)) / (2.0 * pi);
  EXPECT_NEAR(dominant_frequency(traj, 0, {0.0, 2.0}), expected, 0.02 * expected);
  EXPECT_THROW(dominant_frequency(traj, 1, {0.0, 2.0}), InvalidInput);
}

TEST(DominantFrequency, NominalStepResponseIsUnderdamped) {
  const auto chain = build_chain(ActuatorGeometry{}, 5);
  const auto traj = simulate(chain, testing::nominal_params(), ActuatorGeometry{}, nominal_pulse(),
                             fixed_step(1.2, 1e-4));
  const double f = dominant_frequency(traj, 4, {0.12, 1.12});
  EXPECT_GE(f, 3.0);
  EXPECT_LE(f, 8.0);
}

}  // namespace
}  // namespace sbarom
