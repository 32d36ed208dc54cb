#pragma once

#include <Eigen/Dense>

#include <span>

#include "kentmix/kent_model.hpp"

namespace kentmix {

/// Frame subproblem kappa m.xi1 + beta (xi2' S xi2 - xi3' S xi3) for one
/// component, reduced to its sufficient statistics m = sum tau x and
/// S = sum tau x x'.
struct FrameObjective {
  double kappa = 0.0;
  double beta = 0.0;
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();

  /// Sufficient statistics of weighted unit vectors, accumulated pairwise.
  static FrameObjective from_data(std::span<const UnitVector3> data,
                                  std::span<const double> weights, double kappa, double beta);
};

struct AscentConfig {
  int max_steps = 50;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  int max_halvings = 30;
  double grad_tol = 1e-8;
};

double frame_objective_value(const Frame3& frame, const FrameObjective& obj);

/// Euclidean gradient [kappa m | 2 beta S xi2 | -2 beta S xi3].
Eigen::Matrix3d euclidean_gradient(const Eigen::Matrix3d& frame, const FrameObjective& obj);

/// Tangent-space projection G - X sym(X' G) of the Euclidean gradient.
Eigen::Matrix3d riemannian_gradient(const Frame3& frame, const FrameObjective& obj);

/// Q factor of frame + step, with column signs chosen so that diag(R) > 0.
/// Throws RetractionError if frame + step is numerically rank deficient.
Frame3 retract(const Frame3& frame, const Eigen::Matrix3d& step);

/// Projected-gradient ascent with QR retraction and backtracking. A step is
/// taken only when it strictly increases the objective and meets an Armijo
/// condition, so the returned frame never scores below the input.
Frame3 ascend_frame(const Frame3& frame, const FrameObjective& obj, const AscentConfig& cfg = {});

/// Initial frame from weighted moments: xi1 is the weighted mean direction;
/// xi2 and xi3 are the principal axes of the scatter restricted to the plane
/// orthogonal to xi1, by descending eigenvalue.
/// Throws DomainError if the weights sum to zero and DegenerateDataError if
/// the weighted mean vanishes.
Frame3 moment_init_frame(std::span<const UnitVector3> data, std::span<const double> weights);

}  // namespace kentmix
