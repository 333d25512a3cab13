#include "sbarom/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sbarom/error.hpp"

namespace sbarom {

namespace {

void require_size(const LinkChain& chain, const VecX& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != chain.size()) {
    throw InvalidInput(std::string(what) + " has " + std::to_string(v.size()) +
                       " entries, chain has " + std::to_string(chain.size()) + " links");
  }
}

void require_finite(const VecX& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite entries");
}

// Generator of planar rotations: dR(a)/da = R(a) * kSkew.
const Mat2 kSkew = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();

}  // namespace

Mat2 rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

PlanarPose PlanarPose::compose(const PlanarPose& other) const {
  return {angle + other.angle, position + rotation() * other.position};
}

PlanarPose PlanarPose::inverse() const {
  return {-angle, -(sbarom::rotation(-angle) * position)};
}

void LinkParams::validate() const {
  if (!std::isfinite(length) || length <= 0.0) throw InvalidInput("link length must be > 0");
  if (!std::isfinite(offset)) throw InvalidInput("link offset must be finite");
  if (!std::isfinite(mass) || mass < 0.0) throw InvalidInput("link mass must be >= 0");
  if (!std::isfinite(com_distance) || com_distance < 0.0 || com_distance > length) {
    throw InvalidInput("link com_distance must lie in [0, length]");
  }
  if (!std::isfinite(inertia_com) || inertia_com < 0.0) {
    throw InvalidInput("link inertia_com must be >= 0");
  }
}

LinkChain::LinkChain(std::vector<LinkParams> links) : links_(std::move(links)) {
  if (links_.empty()) throw InvalidInput("a link chain needs at least one link");
  for (const auto& l : links_) l.validate();
}

double LinkChain::total_length() const {
  double sum = 0.0;
  for (const auto& l : links_) sum += l.length;
  return sum;
}

double LinkChain::total_mass() const {
  double sum = 0.0;
  for (const auto& l : links_) sum += l.mass;
  return sum;
}

PlanarPose link_transform(const LinkParams& link, double theta) {
  if (!std::isfinite(theta)) throw InvalidInput("joint angle must be finite");
  const double a = theta + link.offset;
  return {a, rotation(a) * Vec2(0.0, link.length)};
}

std::vector<PlanarPose> forward_kinematics(const LinkChain& chain, const VecX& q) {
  require_size(chain, q, "q");
  std::vector<PlanarPose> poses;
  poses.reserve(chain.size());
  PlanarPose prev = PlanarPose::identity();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const PlanarPose local = link_transform(chain[i], q[static_cast<Eigen::Index>(i)]);
    // R^i = R^{i-1} R_i,  p^i = p^{i-1} + R^{i-1} p_i
    prev = prev.compose(local);
    poses.push_back(prev);
  }
  return poses;
}

std::vector<Vec2> joint_positions(const LinkChain& chain, const VecX& q) {
  const auto poses = forward_kinematics(chain, q);
  std::vector<Vec2> pts;
  pts.reserve(poses.size() + 1);
  pts.emplace_back(Vec2::Zero());
  for (const auto& p : poses) pts.push_back(p.position);
  return pts;
}

std::vector<BodyVelocity> body_velocities(const LinkChain& chain, const JointState& state) {
  require_size(chain, state.q, "q");
  require_size(chain, state.qdot, "qdot");
  require_finite(state.q, "q");
  require_finite(state.qdot, "qdot");

  std::vector<BodyVelocity> out;
  out.reserve(chain.size());
  Mat2 omega_prev = Mat2::Zero();  // skew-symmetric body rate of the parent frame
  Vec2 v_prev = Vec2::Zero();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const LinkParams& link = chain[i];
    const double rate = state.qdot[k];
    const Mat2 r = rotation(state.q[k] + link.offset);
    const Mat2 r_dot = rate * r * kSkew;
    const Vec2 axis(0.0, link.length);
    const Vec2 p = r * axis;
    const Vec2 p_dot = r_dot * axis;

    const Mat2 omega = r.transpose() * (omega_prev * r + r_dot);
    const Vec2 v = r.transpose() * (v_prev + omega_prev * p + p_dot);
    // With the CCW convention the (2,1) entry of the skew matrix is +omega.
    out.push_back({omega(1, 0), v});
    omega_prev = omega;
    v_prev = v;
  }
  return out;
}

Vec2 tip_velocity(const LinkChain& chain, const JointState& state) {
  const auto vel = body_velocities(chain, state);
  const auto poses = forward_kinematics(chain, state.q);
  return poses.back().rotation() * vel.back().v;
}

std::vector<Vec2> com_positions(const LinkChain& chain, const VecX& q) {
  const auto poses = forward_kinematics(chain, q);
  std::vector<Vec2> coms;
  coms.reserve(chain.size());
  Vec2 base = Vec2::Zero();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    coms.push_back(base + poses[i].rotation() * Vec2(0.0, chain[i].com_distance));
    base = poses[i].position;
  }
  return coms;
}

std::vector<ComJacobian> com_jacobians(const LinkChain& chain, const VecX& q) {
  const auto joints = joint_positions(chain, q);
  const auto coms = com_positions(chain, q);
  const auto n = static_cast<Eigen::Index>(chain.size());

  std::vector<ComJacobian> out;
  out.reserve(chain.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    ComJacobian jac{Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n),
                    Eigen::RowVectorXd::Zero(n)};
    for (Eigen::Index j = 0; j <= i; ++j) {
      // Joint j rotates everything distal to it about its own location.
      jac.linear.col(j) = perp(coms[i] - joints[j]);
      jac.angular[j] = 1.0;
    }
    out.push_back(std::move(jac));
  }
  return out;
}

}  // namespace sbarom
