#include "kentmix/stiefel_opt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kentmix/errors.hpp"
#include "kentmix/numeric.hpp"

namespace kentmix {
namespace {

double objective(const Eigen::Matrix3d& f, const FrameObjective& obj) {
  const Eigen::Vector3d xi2 = f.col(1);
  const Eigen::Vector3d xi3 = f.col(2);
  return obj.kappa * obj.m.dot(f.col(0)) +
         obj.beta * (xi2.dot(obj.S * xi2) - xi3.dot(obj.S * xi3));
}

Eigen::Matrix3d tangent_projection(const Eigen::Matrix3d& x, const Eigen::Matrix3d& g) {
  const Eigen::Matrix3d xtg = x.transpose() * g;
  return g - x * (0.5 * (xtg + xtg.transpose()));
}

}  // namespace

FrameObjective FrameObjective::from_data(std::span<const UnitVector3> data,
                                         std::span<const double> weights, double kappa,
                                         double beta) {
  if (data.size() != weights.size()) {
    throw DomainError("FrameObjective::from_data: data and weight lengths differ");
  }
  FrameObjective obj;
  obj.kappa = kappa;
  obj.beta = beta;
  if (data.empty()) return obj;
  obj.m = pairwise_sum<Eigen::Vector3d>(
      0, data.size(), [&](std::size_t i) -> Eigen::Vector3d { return weights[i] * data[i].vec(); });
  obj.S = pairwise_sum<Eigen::Matrix3d>(0, data.size(), [&](std::size_t i) -> Eigen::Matrix3d {
    return weights[i] * (data[i].vec() * data[i].vec().transpose());
  });
  return obj;
}

double frame_objective_value(const Frame3& frame, const FrameObjective& obj) {
  return objective(frame.matrix(), obj);
}

Eigen::Matrix3d euclidean_gradient(const Eigen::Matrix3d& frame, const FrameObjective& obj) {
  Eigen::Matrix3d g;
  g.col(0) = obj.kappa * obj.m;
  g.col(1) = 2.0 * obj.beta * (obj.S * frame.col(1));
  g.col(2) = -2.0 * obj.beta * (obj.S * frame.col(2));
  return g;
}

Eigen::Matrix3d riemannian_gradient(const Frame3& frame, const FrameObjective& obj) {
  return tangent_projection(frame.matrix(), euclidean_gradient(frame.matrix(), obj));
}

Frame3 retract(const Frame3& frame, const Eigen::Matrix3d& step) {
  if (step.isZero(0.0)) return frame;
  const Eigen::Matrix3d a = frame.matrix() + step;
  if (!a.allFinite()) throw RetractionError("retract: non-finite step");

  const Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::Matrix3d q = qr.householderQ();
  const double scale = a.norm();
  for (int j = 0; j < 3; ++j) {
    if (std::abs(r(j, j)) <= 1e-12 * scale) {
      throw RetractionError("retract: frame + step is rank deficient");
    }
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return Frame3(q);
}

Frame3 ascend_frame(const Frame3& frame, const FrameObjective& obj, const AscentConfig& cfg) {
  Frame3 current = frame;
  double value = objective(current.matrix(), obj);
  double step = cfg.initial_step;

  for (int it = 0; it < cfg.max_steps; ++it) {
    const Eigen::Matrix3d grad =
        tangent_projection(current.matrix(), euclidean_gradient(current.matrix(), obj));
    const double grad_norm = grad.norm();
    if (!(grad_norm > cfg.grad_tol)) break;
    const Eigen::Matrix3d direction = grad / grad_norm;

    bool accepted = false;
    double t = std::min(cfg.initial_step, 2.0 * step);
    for (int h = 0; h <= cfg.max_halvings; ++h, t *= cfg.backtrack_factor) {
      Eigen::Matrix3d candidate;
      try {
        candidate = retract(current, t * direction).matrix();
      } catch (const RetractionError&) {
        continue;
      }
      const double trial = objective(candidate, obj);
      // <grad, direction> = grad_norm for the unit tangent direction.
      if (trial > value && trial >= value + 1e-4 * t * grad_norm) {
        current = Frame3(candidate);
        value = trial;
        step = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return current;
}

Frame3 moment_init_frame(std::span<const UnitVector3> data, std::span<const double> weights) {
  if (data.size() != weights.size()) {
    throw DomainError("moment_init_frame: data and weight lengths differ");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("moment_init_frame: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("moment_init_frame: weights sum to zero");

  const FrameObjective stats = FrameObjective::from_data(data, weights, 0.0, 0.0);
  const double m_norm = stats.m.norm();
  if (!(m_norm > 1e-12 * total)) {
    throw DegenerateDataError("moment_init_frame: weighted mean direction vanishes");
  }
  const Eigen::Vector3d xi1 = stats.m / m_norm;

  // Orthonormal basis (u, v) of the plane orthogonal to xi1.
  int k = 0;
  xi1.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d u = Eigen::Vector3d::Unit(k) - xi1[k] * xi1;
  u.normalize();
  Eigen::Vector3d v = xi1.cross(u);

  Eigen::Matrix<double, 3, 2> basis;
  basis << u, v;
  const Eigen::Matrix2d plane = basis.transpose() * stats.S * basis;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(plane);
  // Eigenvalues come back ascending.
  Eigen::Vector3d xi2 = basis * eig.eigenvectors().col(1);
  xi2 -= xi2.dot(xi1) * xi1;
  xi2.normalize();
  Eigen::Vector3d xi3 = xi1.cross(xi2);
  xi3 -= xi3.dot(xi1) * xi1 + xi3.dot(xi2) * xi2;
  xi3.normalize();

  Eigen::Matrix3d f;
  f << xi1, xi2, xi3;
  return Frame3(f);
}

}  // namespace kentmix
