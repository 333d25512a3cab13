#pragma once

// Reduced-order equation of motion
//
//   M(q) qdd + (C(q, qd) + D) qd + k_b q = tau
//
// for a planar chain of uniform rods driven by the same pressure torque at
// every joint. There is no gravity term.

#include <cstddef>
#include <optional>
#include <vector>

#include "sbarom/kinematics.hpp"

namespace sbarom {

struct SensorFrame;

struct ActuatorGeometry {
  double r1 = 0.014;            // m, outer radius
  double r2 = 0.010;            // m, bladder radius
  double wall = 0.004;          // m
  double total_length = 0.17;   // m
  double total_mass = 0.069;    // kg

  void validate() const;
  bool operator==(const ActuatorGeometry&) const = default;
};

struct DynamicsParams {
  double k_b = 1.6067;          // N m / rad, shared joint spring
  std::vector<double> damping;  // N m s / rad, one per joint

  /// Shared scalar damping replicated over n joints.
  static DynamicsParams uniform(double k_b, double damping, std::size_t n);
  /// Throws InvalidInput unless k_b > 0, damping >= 0 and |damping| == n.
  void validate(std::size_t n) const;
  bool operator==(const DynamicsParams&) const = default;
};

struct GeneralizedMatrices {
  MatX M;
  MatX C;
  MatX D;
  MatX K;
};

/// Uniform slender rods with length-proportional mass. Lengths and offsets
/// come from `reference` when given, else the length is split evenly.
LinkChain build_chain(const ActuatorGeometry& geometry, std::size_t n,
                      const SensorFrame* reference = nullptr);

/// Torque of the semi-annular bladder: p * (pi r2^2 / 2) * (4 r2 / (3 pi)).
double pressure_torque(const ActuatorGeometry& geometry, double pressure);

MatX mass_matrix(const LinkChain& chain, const VecX& q);

/// Partial derivatives dM/dq_l, l = 0..n-1 (analytic).
std::vector<MatX> mass_matrix_partials(const LinkChain& chain, const VecX& q);

/// Christoffel-symbol Coriolis/centrifugal matrix.
MatX coriolis_matrix(const LinkChain& chain, const VecX& q, const VecX& qdot);

GeneralizedMatrices generalized_matrices(const LinkChain& chain, const DynamicsParams& params,
                                         const JointState& state);

/// Joint accelerations from an SPD solve of the equation of motion.
VecX eom_accel(const LinkChain& chain, const DynamicsParams& params,
               const ActuatorGeometry& geometry, const JointState& state, double pressure);

double kinetic_energy(const LinkChain& chain, const JointState& state);

/// Kinetic plus elastic energy.
double total_energy(const LinkChain& chain, const DynamicsParams& params, const JointState& state);

}  // namespace sbarom
