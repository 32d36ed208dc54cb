#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace kentmix {

inline constexpr double kDefaultBetaFloor = 1e-5;  // B-bar
inline constexpr double kDefaultGapFloor = 1e-5;   // K-bar

/// Lower bounds beta >= bbar and kappa - 2 beta >= kbar.
struct ShapeFloors {
  double bbar = kDefaultBetaFloor;
  double kbar = kDefaultGapFloor;
};

/// A point on the unit 2-sphere.
class UnitVector3 {
 public:
  static constexpr double kNormTolerance = 1e-9;

  /// Throws DomainError unless | ||v|| - 1 | <= kNormTolerance.
  explicit UnitVector3(const Eigen::Vector3d& v);
  UnitVector3(double x, double y, double z) : UnitVector3(Eigen::Vector3d(x, y, z)) {}

  /// v / ||v||; throws DomainError for a zero or non-finite vector.
  static UnitVector3 normalized(const Eigen::Vector3d& v);

  const Eigen::Vector3d& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double dot(const Eigen::Vector3d& other) const { return v_.dot(other); }

  friend bool operator==(const UnitVector3& a, const UnitVector3& b) { return a.v_ == b.v_; }

 private:
  struct Unchecked {};
  UnitVector3(const Eigen::Vector3d& v, Unchecked) : v_(v) {}

  Eigen::Vector3d v_;
};

/// Orthonormal frame [xi1 xi2 xi3]: mean direction, major and minor axes.
/// Determinant -1 is allowed.
class Frame3 {
 public:
  static constexpr double kOrthonormalityTolerance = 1e-9;

  /// Throws DomainError unless M^T M = I entrywise within tolerance.
  explicit Frame3(const Eigen::Matrix3d& m);

  static Frame3 identity() { return Frame3(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  Eigen::Vector3d xi1() const { return m_.col(0); }
  Eigen::Vector3d xi2() const { return m_.col(1); }
  Eigen::Vector3d xi3() const { return m_.col(2); }

  /// Largest entry of |M^T M - I|.
  static double orthonormality_error(const Eigen::Matrix3d& m);

  friend bool operator==(const Frame3& a, const Frame3& b) { return a.m_ == b.m_; }

 private:
  Eigen::Matrix3d m_;
};

/// Shape (beta, kappa) and orientation of one Kent component.
class KentParams {
 public:
  /// Throws DomainError unless beta >= floors.bbar and
  /// kappa - 2 beta >= floors.kbar (both finite).
  KentParams(double beta, double kappa, Frame3 frame, ShapeFloors floors = {});

  double beta() const { return beta_; }
  double kappa() const { return kappa_; }
  const Frame3& frame() const { return frame_; }

  friend bool operator==(const KentParams&, const KentParams&) = default;

 private:
  double beta_;
  double kappa_;
  Frame3 frame_;
};

/// Weights and components of a g-component Kent mixture.
///
/// Weights are nonnegative and sum to one within 1e-12. A weight may be
/// exactly zero when the fitter has frozen an empty component.
class MixtureModel {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  MixtureModel(std::vector<double> weights, std::vector<KentParams> components);

  std::size_t g() const { return components_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<KentParams>& components() const { return components_; }
  double weight(std::size_t z) const { return weights_[z]; }
  const KentParams& component(std::size_t z) const { return components_[z]; }

  friend bool operator==(const MixtureModel&, const MixtureModel&) = default;

 private:
  std::vector<double> weights_;
  std::vector<KentParams> components_;
};

/// n x g posterior membership probabilities; rows sum to one.
struct Responsibilities {
  Eigen::MatrixXd matrix;

  std::size_t n() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t g() const { return static_cast<std::size_t>(matrix.cols()); }
};

/// Responsibilities together with log f~(x_i; theta) for every row.
struct PosteriorPass {
  Responsibilities resp;
  std::vector<double> row_log_density;
  double log_likelihood = 0.0;
};

double log_density_exact(const UnitVector3& x, const KentParams& p);

/// Log density with the large-kappa normalizer, in the folded form
/// kappa (x.xi1 - 1) + beta ((x.xi2)^2 - (x.xi3)^2) + log(kappa^2 - 4 beta^2)/2 - log(2 pi).
double log_density_approx(const UnitVector3& x, const KentParams& p);

/// Approximate mixture log-likelihood; rows reduced by pairwise summation.
/// Throws DomainError for empty data.
double approx_log_likelihood(std::span<const UnitVector3> data, const MixtureModel& m);

Responsibilities responsibilities(std::span<const UnitVector3> data, const MixtureModel& m);

/// One pass over the data producing both responsibilities and the
/// approximate log-likelihood.
PosteriorPass posterior_pass(std::span<const UnitVector3> data, const MixtureModel& m);

}  // namespace kentmix
