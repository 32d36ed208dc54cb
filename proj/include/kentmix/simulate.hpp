#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kentmix/bslm_fitter.hpp"
#include "kentmix/kent_model.hpp"
#include "kentmix/random.hpp"
#include "kentmix/selection.hpp"

namespace kentmix {

/// n draws from the von Mises-Fisher distribution vMF(mu, kappa) on S^2.
/// The cosine to mu has the closed-form inverse CDF
///   w = 1 + log(u + (1 - u) e^{-2 kappa}) / kappa,
/// and the longitude is uniform.
std::vector<UnitVector3> sample_vmf(const UnitVector3& mu, double kappa, std::size_t n, Rng& rng);

/// Haar-uniform orthonormal frame: Q of a standard-normal 3x3 matrix with
/// the signs fixed so that diag(R) > 0.
Frame3 sample_uniform_frame(Rng& rng);

struct LabeledSample {
  std::vector<UnitVector3> points;
  Labeling labels;  // 1-based component labels
};

/// Hierarchical draw: labels from the weights, points from vMF(xi1_z,
/// kappa_z). Only beta <= beta_floor is supported; larger beta throws
/// UnsupportedSamplingError.
LabeledSample generate_mixture_sample(const MixtureModel& model, std::size_t n, Rng& rng,
                                      double beta_floor = kDefaultBetaFloor);

enum class Study { S1, S2, S3, S4 };

Study parse_study(const std::string& name);
std::string study_name(Study s);

struct StudySpec {
  Study study = Study::S1;
  std::size_t n = 1000;
  int reps = 20;
  std::uint64_t seed = 0;
};

/// Generative model of a study. S3 draws its frames uniformly, so it needs
/// the replication's generator.
MixtureModel study_truth(Study study, Rng& rng, double beta_floor = kDefaultBetaFloor);

/// Greedy pairing of fitted to true components by largest xi1_hat . xi1.
/// The signed cosine keeps antipodal true means (+e, -e) apart.
/// Entry z is the fitted index matched to true component z.
std::vector<std::size_t> match_components(const MixtureModel& fitted, const MixtureModel& truth);

struct RepRecord {
  int rep = 0;
  bool failed = false;
  std::string error;
  double sq_err_pi = 0.0;               // summed over components
  double sq_err_kappa = 0.0;            // summed over components
  std::vector<double> sq_err_xi;        // per true component
  double ari = 0.0;
  int selected_g = 0;
  std::vector<std::pair<int, double>> criterion;  // (g, criterion) for S3
  double final_loglik = 0.0;
  int monotonicity_violations = 0;
};

struct StudyResult {
  StudySpec spec;
  int g_true = 0;
  int failures = 0;
  double mse_pi = 0.0;
  double mse_kappa = 0.0;
  std::vector<double> mse_xi;  // per true component
  double ari_mean = 0.0;
  std::map<int, int> bic_selection_counts;
  std::map<int, double> mean_criterion;
  std::vector<RepRecord> per_rep;
};

/// Runs one of the simulation protocols. cfg supplies iteration, restart,
/// and floor settings; its g and seed are overridden per replication.
/// S3 sweeps g over [g_min, g_max].
StudyResult run_study(const StudySpec& spec, const FitConfig& cfg, int g_min = 2, int g_max = 10);

/// Pretty JSON with every per-replication record; identical inputs give
/// identical bytes.
std::string study_result_to_json(const StudyResult& result);

}  // namespace kentmix
