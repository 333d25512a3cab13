#include "sbarom/dynamics.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <string>

#include "sbarom/error.hpp"
#include "sbarom/reconstruction.hpp"

namespace sbarom {

namespace {

void require_state(const LinkChain& chain, const VecX& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != chain.size()) {
    throw InvalidInput(std::string(what) + " size does not match chain");
  }
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " contains non-finite entries");
}

}  // namespace

void ActuatorGeometry::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(r2)) throw InvalidInput("r2 must be > 0");
  if (!positive(r1) || !(r2 < r1)) throw InvalidInput("r2 must be smaller than r1");
  if (!positive(wall)) throw InvalidInput("wall must be > 0");
  if (!positive(total_length)) throw InvalidInput("total_length must be > 0");
  if (!positive(total_mass)) throw InvalidInput("total_mass must be > 0");
}

DynamicsParams DynamicsParams::uniform(double k_b, double damping, std::size_t n) {
  return {k_b, std::vector<double>(n, damping)};
}

void DynamicsParams::validate(std::size_t n) const {
  if (!std::isfinite(k_b) || k_b <= 0.0) throw InvalidInput("k_b must be > 0");
  if (damping.size() != n) {
    throw InvalidInput("damping has " + std::to_string(damping.size()) + " entries, expected " +
                       std::to_string(n));
  }
  for (double d : damping) {
    if (!std::isfinite(d) || d < 0.0) throw InvalidInput("damping entries must be >= 0");
  }
}

LinkChain build_chain(const ActuatorGeometry& geometry, std::size_t n, const SensorFrame* reference) {
  geometry.validate();
  if (n < 1) throw InvalidInput("link count must be >= 1");

  std::vector<LinkParams> links;
  if (reference != nullptr) {
    const auto ref = fit_reference_chain(*reference, n);
    links.assign(ref.links().begin(), ref.links().end());
  } else {
    links.resize(n);
    for (auto& l : links) l.length = geometry.total_length / static_cast<double>(n);
  }

  double total = 0.0;
  for (const auto& l : links) total += l.length;
  for (auto& l : links) {
    l.mass = geometry.total_mass * l.length / total;
    l.com_distance = l.length / 2.0;
    l.inertia_com = l.mass * l.length * l.length / 12.0;
  }
  return LinkChain(std::move(links));
}

double pressure_torque(const ActuatorGeometry& geometry, double pressure) {
  const double area = std::numbers::pi * geometry.r2 * geometry.r2 / 2.0;
  const double arm = 4.0 * geometry.r2 / (3.0 * std::numbers::pi);
  return pressure * area * arm;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Lever arms r(i, j) = c_i - o_j from joint j to the centre of mass of link i
// (j <= i), where o_j is the location of joint j. Column j of link i's linear
// COM Jacobian is perp(r(i, j)).
class LeverArms {
 public:
  LeverArms(const LinkChain& chain, const VecX& q) : n_(chain.size()), r_(n_ * n_, Vec2::Zero()) {
    const auto joints = joint_positions(chain, q);
    const auto coms = com_positions(chain, q);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) r_[i * n_ + j] = coms[i] - joints[j];
    }
  }
  const Vec2& operator()(std::size_t i, std::size_t j) const { return r_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<Vec2> r_;
};

MatX assemble_mass(const LinkChain& chain, const LeverArms& r) {
  const std::size_t n = chain.size();
  MatX m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = j; i < n; ++i) {
        acc += chain[i].mass * r(i, k).dot(r(i, j)) + chain[i].inertia_com;
      }
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = acc;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = acc;
    }
  }
  return m;
}

// Differentiating perp(c_i - o_j) w.r.t. q_l (l, j <= i) gives
// -(c_i - o_max(j,l)); angular Jacobians are constant. Hence
//   dM_kj/dq_l = sum_{i >= max(k,j,l)} m_i [ r(i,max(k,l)) x r(i,j) + r(i,max(j,l)) x r(i,k) ].
std::vector<MatX> assemble_partials(const LinkChain& chain, const LeverArms& r) {
  const std::size_t n = chain.size();
  const auto nn = static_cast<Eigen::Index>(n);
  std::vector<MatX> partials(n, MatX::Zero(nn, nn));
  for (std::size_t l = 0; l < n; ++l) {
    MatX& dm = partials[l];
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = k; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = std::max(j, l); i < n; ++i) {
          acc += chain[i].mass *
                 (cross(r(i, std::max(k, l)), r(i, j)) + cross(r(i, std::max(j, l)), r(i, k)));
        }
        dm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = acc;
        dm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = acc;
      }
    }
  }
  return partials;
}

MatX christoffel(const std::vector<MatX>& partials, const VecX& qdot) {
  const auto n = qdot.size();
  MatX c = MatX::Zero(n, n);
  // C_kj = 1/2 sum_i (dM_kj/dq_i + dM_ki/dq_j - dM_ij/dq_k) qdot_i
  for (Eigen::Index k = 0; k < n; ++k) {
    const MatX& dk = partials[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const MatX& dj = partials[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += (partials[static_cast<std::size_t>(i)](k, j) + dj(k, i) - dk(i, j)) * qdot[i];
      }
      c(k, j) = 0.5 * acc;
    }
  }
  return c;
}

}  // namespace

MatX mass_matrix(const LinkChain& chain, const VecX& q) {
  require_state(chain, q, "q");
  return assemble_mass(chain, LeverArms(chain, q));
}

std::vector<MatX> mass_matrix_partials(const LinkChain& chain, const VecX& q) {
  require_state(chain, q, "q");
  return assemble_partials(chain, LeverArms(chain, q));
}

MatX coriolis_matrix(const LinkChain& chain, const VecX& q, const VecX& qdot) {
  require_state(chain, q, "q");
  require_state(chain, qdot, "qdot");
  return christoffel(mass_matrix_partials(chain, q), qdot);
}

GeneralizedMatrices generalized_matrices(const LinkChain& chain, const DynamicsParams& params,
                                         const JointState& state) {
  params.validate(chain.size());
  const auto n = static_cast<Eigen::Index>(chain.size());
  GeneralizedMatrices g;
  g.M = mass_matrix(chain, state.q);
  g.C = coriolis_matrix(chain, state.q, state.qdot);
  g.D = Eigen::Map<const VecX>(params.damping.data(), n).asDiagonal();
  g.K = params.k_b * MatX::Identity(n, n);
  return g;
}

VecX eom_accel(const LinkChain& chain, const DynamicsParams& params,
               const ActuatorGeometry& geometry, const JointState& state, double pressure) {
  require_state(chain, state.q, "q");
  require_state(chain, state.qdot, "qdot");
  if (!std::isfinite(pressure)) throw InvalidInput("pressure must be finite");
  params.validate(chain.size());

  const auto n = static_cast<Eigen::Index>(chain.size());
  const LeverArms arms(chain, state.q);
  const MatX m = assemble_mass(chain, arms);
  const MatX c = christoffel(assemble_partials(chain, arms), state.qdot);
  const VecX damping = Eigen::Map<const VecX>(params.damping.data(), n);

  const VecX rhs = VecX::Constant(n, pressure_torque(geometry, pressure)) - c * state.qdot -
                   damping.cwiseProduct(state.qdot) - params.k_b * state.q;
  const Eigen::LLT<MatX> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidInput("mass matrix is not positive definite");
  return llt.solve(rhs);
}

double kinetic_energy(const LinkChain& chain, const JointState& state) {
  require_state(chain, state.qdot, "qdot");
  return 0.5 * state.qdot.dot(mass_matrix(chain, state.q) * state.qdot);
}

double total_energy(const LinkChain& chain, const DynamicsParams& params, const JointState& state) {
  return kinetic_energy(chain, state) + 0.5 * params.k_b * state.q.squaredNorm();
}

}  // namespace sbarom
