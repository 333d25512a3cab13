#pragma once

// Planar serial-link chain geometry.
//
// Conventions: rotations are about the out-of-plane axis, counter-clockwise
// positive. Each link frame is obtained from its parent by a rotation of
// (theta + offset) followed by a translation of `length` along the rotated
// local +Y axis, so a straight chain at rest points along +Y of the task frame.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace sbarom {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Rotation matrix for a CCW angle.
Mat2 rotation(double angle);

/// Rotates `v` by +90 degrees; the planar cross product z x v.
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Rigid planar transform: rotation by `angle`, then `position` in the parent frame.
struct PlanarPose {
  double angle = 0.0;
  Vec2 position = Vec2::Zero();

  static PlanarPose identity() { return {}; }

  /// this * other
  PlanarPose compose(const PlanarPose& other) const;
  PlanarPose inverse() const;
  Mat2 rotation() const { return sbarom::rotation(angle); }
};

struct LinkParams {
  double length = 0.0;        // m
  double offset = 0.0;        // rad, rest angle relative to the previous link
  double mass = 0.0;          // kg
  double com_distance = 0.0;  // m, proximal joint to centre of mass
  double inertia_com = 0.0;   // kg m^2, about the centre of mass

  /// Throws InvalidInput when a field is out of range or non-finite.
  void validate() const;
};

/// Ordered, validated list of links (base to tip). Immutable after construction.
class LinkChain {
 public:
  explicit LinkChain(std::vector<LinkParams> links);

  std::size_t size() const noexcept { return links_.size(); }
  const LinkParams& operator[](std::size_t i) const { return links_[i]; }
  std::span<const LinkParams> links() const noexcept { return links_; }
  double total_length() const;
  double total_mass() const;

 private:
  std::vector<LinkParams> links_;
};

/// Joint angles (deviations from the link offsets) and their rates.
struct JointState {
  VecX q;
  VecX qdot;

  static JointState zero(std::size_t n) { return {VecX::Zero(n), VecX::Zero(n)}; }
  std::size_t size() const { return static_cast<std::size_t>(q.size()); }
  bool is_finite() const { return q.allFinite() && qdot.allFinite(); }
};

/// Angular rate and origin velocity of a link frame, expressed in that frame.
struct BodyVelocity {
  double omega = 0.0;
  Vec2 v = Vec2::Zero();
};

/// Linear (2 x n) and angular (1 x n) Jacobian of one link's centre of mass.
struct ComJacobian {
  Eigen::Matrix<double, 2, Eigen::Dynamic> linear;
  Eigen::RowVectorXd angular;
};

PlanarPose link_transform(const LinkParams& link, double theta);

/// Pose of every link's distal frame in the task frame; element n-1 is the tip.
std::vector<PlanarPose> forward_kinematics(const LinkChain& chain, const VecX& q);

/// Base origin followed by every joint and the tip (n + 1 points).
std::vector<Vec2> joint_positions(const LinkChain& chain, const VecX& q);

std::vector<BodyVelocity> body_velocities(const LinkChain& chain, const JointState& state);

/// Task-space velocity of the tip.
Vec2 tip_velocity(const LinkChain& chain, const JointState& state);

/// Centre-of-mass position of every link in the task frame.
std::vector<Vec2> com_positions(const LinkChain& chain, const VecX& q);

std::vector<ComJacobian> com_jacobians(const LinkChain& chain, const VecX& q);

}  // namespace sbarom
