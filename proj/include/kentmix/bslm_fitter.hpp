#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kentmix/concave_subproblem.hpp"
#include "kentmix/kent_model.hpp"
#include "kentmix/stiefel_opt.hpp"

namespace kentmix {

enum class InitMethod { spherical_kmeans, random_frames };

struct FitConfig {
  int g = 1;
  int max_iterations = 100;
  double rel_tol = 1e-8;  // 0 runs all max_iterations
  int restarts = 10;
  std::uint64_t seed = 0;
  double bbar = kDefaultBetaFloor;
  double kbar = kDefaultGapFloor;
  double kappa_max = kDefaultKappaMax;
  InitMethod init_method = InitMethod::spherical_kmeans;
  AscentConfig ascent{};
  bool record_iterates = false;

  ShapeFloors floors() const { return {bbar, kbar}; }
  /// Throws DomainError on out-of-range fields.
  void validate() const;
};

struct FitReport {
  MixtureModel model;
  double initial_loglik = 0.0;
  std::vector<double> loglik_trace;  // one entry per completed iteration
  std::vector<double> param_drift;   // ||theta(r) - theta(r-1)|| per iteration
  int iterations_run = 0;
  bool converged = false;
  int monotonicity_violations = 0;
  int restart_index_of_best = 0;
  std::vector<double> restart_final_loglik;  // -inf marks a failed restart
  std::vector<std::string> warnings;
  std::vector<MixtureModel> iterates;  // only with FitConfig::record_iterates

  double final_loglik() const {
    return loglik_trace.empty() ? initial_loglik : loglik_trace.back();
  }
};

enum class Block { shapes, frames };

/// Coefficients of one component's shape subproblem plus a flag for a
/// component with no responsibility mass.
struct BlockCoefficients {
  ShapeCoefficients coef;
  bool degenerate = false;
};

/// Tolerance on the effective component size below which a component is
/// frozen for the current step.
inline constexpr double kDegenerateMass = 1e-10;

std::vector<BlockCoefficients> compute_block_coefficients(std::span<const UnitVector3> data,
                                                          const Responsibilities& resp,
                                                          const MixtureModel& model);

/// Column means of the responsibilities.
std::vector<double> update_weights(const Responsibilities& resp);

/// One block update. The shapes block refreshes weights and every (beta,
/// kappa); the frames block refreshes every frame. Both minorize at the
/// input model, so the approximate log-likelihood never decreases.
/// Degenerate components keep their parameters and append a warning.
MixtureModel bslm_step(std::span<const UnitVector3> data, const MixtureModel& model, Block block,
                       const FitConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// Deterministic starting model for restart `restart_index`.
MixtureModel initialize(std::span<const UnitVector3> data, const FitConfig& cfg,
                        int restart_index);

/// Runs the block iteration from a given starting model (one restart).
FitReport fit_from(std::span<const UnitVector3> data, const MixtureModel& start,
                   const FitConfig& cfg);

/// Fits cfg.g components with cfg.restarts restarts and keeps the restart
/// with the highest final approximate log-likelihood (earliest on ties).
/// Throws DomainError if n < g and FitError if every restart fails.
FitReport fit(std::span<const UnitVector3> data, const FitConfig& cfg);

/// Relative trace slack used for monotonicity checks.
inline bool is_monotone_step(double previous, double next) {
  return next >= previous - 1e-8 * (1.0 + (previous < 0 ? -previous : previous));
}

}  // namespace kentmix
