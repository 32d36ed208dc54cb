#include "kentmix/kent_model.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "kentmix/errors.hpp"
#include "kentmix/numeric.hpp"
#include "kentmix/special_fn.hpp"

namespace kentmix {

UnitVector3::UnitVector3(const Eigen::Vector3d& v) : v_(v) {
  const double norm = v.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    throw DomainError(fmt::format("UnitVector3: norm {} is not 1", norm));
  }
}

UnitVector3 UnitVector3::normalized(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw DomainError("UnitVector3::normalized: zero or non-finite vector");
  }
  return UnitVector3(v / norm, Unchecked{});
}

double Frame3::orthonormality_error(const Eigen::Matrix3d& m) {
  return (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Frame3::Frame3(const Eigen::Matrix3d& m) : m_(m) {
  if (!m.allFinite()) throw DomainError("Frame3: non-finite entries");
  const double err = orthonormality_error(m);
  if (err > kOrthonormalityTolerance) {
    throw DomainError(fmt::format("Frame3: not orthonormal (max |M^T M - I| = {})", err));
  }
}

KentParams::KentParams(double beta, double kappa, Frame3 frame, ShapeFloors floors)
    : beta_(beta), kappa_(kappa), frame_(std::move(frame)) {
  if (!std::isfinite(beta) || !std::isfinite(kappa)) {
    throw DomainError("KentParams: non-finite shape parameters");
  }
  if (beta < floors.bbar) {
    throw DomainError(fmt::format("KentParams: beta={} below floor {}", beta, floors.bbar));
  }
  if (kappa - 2.0 * beta < floors.kbar) {
    throw DomainError(fmt::format("KentParams: kappa - 2 beta = {} below floor {}",
                                  kappa - 2.0 * beta, floors.kbar));
  }
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<KentParams> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) throw DomainError("MixtureModel: g must be at least 1");
  if (weights_.size() != components_.size()) {
    throw DomainError(fmt::format("MixtureModel: {} weights for {} components", weights_.size(),
                                  components_.size()));
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw DomainError(fmt::format("MixtureModel: invalid weight {}", w));
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw DomainError(fmt::format("MixtureModel: weights sum to {:.17g}", total));
  }
}

double log_density_exact(const UnitVector3& x, const KentParams& p) {
  const Eigen::Matrix3d& f = p.frame().matrix();
  const double t1 = x.dot(f.col(0));
  const double t2 = x.dot(f.col(1));
  const double t3 = x.dot(f.col(2));
  return p.kappa() * t1 + p.beta() * (t2 * t2 - t3 * t3) -
         log_kent_normalizer_exact(p.beta(), p.kappa()).value;
}

double log_density_approx(const UnitVector3& x, const KentParams& p) {
  const Eigen::Matrix3d& f = p.frame().matrix();
  const double kappa = p.kappa();
  const double beta = p.beta();
  const double t1 = x.dot(f.col(0));
  const double t2 = x.dot(f.col(1));
  const double t3 = x.dot(f.col(2));
  return kappa * (t1 - 1.0) + beta * (t2 * t2 - t3 * t3) +
         0.5 * (std::log(kappa - 2.0 * beta) + std::log(kappa + 2.0 * beta)) -
         std::log(2.0 * std::numbers::pi);
}

PosteriorPass posterior_pass(std::span<const UnitVector3> data, const MixtureModel& m) {
  if (data.empty()) throw DomainError("posterior_pass: empty data");
  const std::size_t n = data.size();
  const std::size_t g = m.g();

  std::vector<double> log_weight(g);
  for (std::size_t z = 0; z < g; ++z) log_weight[z] = std::log(m.weight(z));

  PosteriorPass out;
  out.resp.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g));
  out.row_log_density.resize(n);

  std::vector<double> joint(g);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t z = 0; z < g; ++z) {
      joint[z] = log_weight[z] + log_density_approx(data[i], m.component(z));
    }
    const double lse = log_sum_exp(joint);
    out.row_log_density[i] = lse;
    for (std::size_t z = 0; z < g; ++z) {
      out.resp.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(z)) =
          std::exp(joint[z] - lse);
    }
  }
  out.log_likelihood = pairwise_sum(out.row_log_density);
  return out;
}

double approx_log_likelihood(std::span<const UnitVector3> data, const MixtureModel& m) {
  if (data.empty()) throw DomainError("approx_log_likelihood: empty data");
  return posterior_pass(data, m).log_likelihood;
}

Responsibilities responsibilities(std::span<const UnitVector3> data, const MixtureModel& m) {
  return posterior_pass(data, m).resp;
}

}  // namespace kentmix
