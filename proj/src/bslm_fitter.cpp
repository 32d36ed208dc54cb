#include "kentmix/bslm_fitter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kentmix/errors.hpp"
#include "kentmix/numeric.hpp"
#include "kentmix/random.hpp"
#include "kentmix/simulate.hpp"

namespace kentmix {
namespace {

std::span<const double> column(const Responsibilities& resp, std::size_t z) {
  return {resp.matrix.col(static_cast<Eigen::Index>(z)).data(), resp.n()};
}

void warn(std::vector<std::string>* sink, std::string msg) {
  if (sink == nullptr) return;
  if (std::find(sink->begin(), sink->end(), msg) == sink->end()) sink->push_back(std::move(msg));
}

MixtureModel shapes_update(std::span<const UnitVector3> data, const MixtureModel& model,
                           const Responsibilities& resp, const FitConfig& cfg,
                           std::vector<std::string>* warnings) {
  const std::vector<double> weights = update_weights(resp);
  const std::vector<BlockCoefficients> coefs = compute_block_coefficients(data, resp, model);

  std::vector<KentParams> comps;
  comps.reserve(model.g());
  for (std::size_t z = 0; z < model.g(); ++z) {
    const KentParams& old = model.component(z);
    const BlockCoefficients& bc = coefs[z];
    if (bc.degenerate) {
      warn(warnings, fmt::format("component {}: no responsibility mass, shape frozen", z + 1));
      comps.push_back(old);
      continue;
    }
    const double old_value = shape_objective(bc.coef, old.beta(), old.kappa());
    double beta = old.beta();
    double kappa = old.kappa();
    if (bc.coef.b >= 0.0) {
      // All mass sits exactly on xi1: the objective grows without bound in kappa.
      warn(warnings, fmt::format("component {}: all mass at the mean direction, kappa clamped at {}",
                                 z + 1, cfg.kappa_max));
      if (shape_objective(bc.coef, cfg.bbar, cfg.kappa_max) >= old_value) {
        beta = cfg.bbar;
        kappa = cfg.kappa_max;
      }
    } else {
      const ShapeSolution sol = solve_shape(bc.coef, cfg.bbar, cfg.kbar, cfg.kappa_max);
      if (sol.objective >= old_value) {
        beta = sol.beta;
        kappa = sol.kappa;
      }
    }
    comps.emplace_back(beta, kappa, old.frame(), cfg.floors());
  }
  return MixtureModel(weights, std::move(comps));
}

MixtureModel frames_update(std::span<const UnitVector3> data, const MixtureModel& model,
                           const Responsibilities& resp, const FitConfig& cfg,
                           std::vector<std::string>* warnings) {
  std::vector<KentParams> comps;
  comps.reserve(model.g());
  for (std::size_t z = 0; z < model.g(); ++z) {
    const KentParams& old = model.component(z);
    const std::span<const double> tau = column(resp, z);
    const double mass = pairwise_sum(tau);
    if (!(mass > kDegenerateMass)) {
      warn(warnings, fmt::format("component {}: no responsibility mass, frame frozen", z + 1));
      comps.push_back(old);
      continue;
    }
    const FrameObjective obj = FrameObjective::from_data(data, tau, old.kappa(), old.beta());
    comps.emplace_back(old.beta(), old.kappa(), ascend_frame(old.frame(), obj, cfg.ascent),
                       cfg.floors());
  }
  return MixtureModel(model.weights(), std::move(comps));
}

double parameter_distance(const MixtureModel& a, const MixtureModel& b) {
  double sq = 0.0;
  for (std::size_t z = 0; z < a.g(); ++z) {
    const double dw = a.weight(z) - b.weight(z);
    const double db = a.component(z).beta() - b.component(z).beta();
    const double dk = a.component(z).kappa() - b.component(z).kappa();
    sq += dw * dw + db * db + dk * dk +
          (a.component(z).frame().matrix() - b.component(z).frame().matrix()).squaredNorm();
  }
  return std::sqrt(sq);
}

// Mean resultant length to concentration: R (3 - R^2) / (1 - R^2).
double kappa_from_resultant(double rbar, const FitConfig& cfg) {
  const double lo = cfg.kbar + 2.0 * cfg.bbar + 1e-3;
  const double hi = cfg.kappa_max;
  if (!(rbar < 1.0)) return hi;
  const double k = rbar * (3.0 - rbar * rbar) / (1.0 - rbar * rbar);
  return std::clamp(k, lo, hi);
}

KentParams initial_shape(double kappa, Frame3 frame, const FitConfig& cfg) {
  const double beta = std::max(cfg.bbar, std::min(kappa / 4.0, 1.0));
  kappa = std::min(std::max(kappa, 2.0 * beta + cfg.kbar + 1e-3), cfg.kappa_max);
  return KentParams(beta, kappa, std::move(frame), cfg.floors());
}

MixtureModel kmeans_start(std::span<const UnitVector3> data, const FitConfig& cfg, Rng& rng) {
  const std::size_t n = data.size();
  const auto g = static_cast<std::size_t>(cfg.g);

  // k-means++ seeding on cosine dissimilarity 1 - x.c
  std::vector<Eigen::Vector3d> centers;
  centers.push_back(data[rng.index(n)].vec());
  std::vector<double> dissim(n);
  for (std::size_t i = 0; i < n; ++i) dissim[i] = std::max(0.0, 1.0 - data[i].dot(centers[0]));
  while (centers.size() < g) {
    double total = 0.0;
    for (double d : dissim) total += d;
    const std::size_t pick = total > 0.0 ? rng.categorical(dissim) : rng.index(n);
    centers.push_back(data[pick].vec());
    for (std::size_t i = 0; i < n; ++i) {
      dissim[i] = std::min(dissim[i], std::max(0.0, 1.0 - data[i].dot(centers.back())));
    }
  }

  std::vector<std::size_t> label(n, 0);
  std::vector<double> similarity(n, 0.0);
  auto assign = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_sim = data[i].dot(centers[0]);
      for (std::size_t z = 1; z < g; ++z) {
        const double s = data[i].dot(centers[z]);
        if (s > best_sim) {
          best_sim = s;
          best = z;
        }
      }
      label[i] = best;
      similarity[i] = best_sim;
    }
  };
  // Index of the point farthest from its center, excluding singletons'
  // only member so that moving it never empties another cluster.
  auto farthest = [&](const std::vector<std::size_t>& counts) {
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[label[i]] <= 1) continue;
      if (far == n || similarity[i] < similarity[far]) far = i;
    }
    return far;
  };

  constexpr int kLloydIterations = 10;
  std::vector<std::size_t> counts(g);
  for (int it = 0; it < kLloydIterations; ++it) {
    assign();
    std::vector<Eigen::Vector3d> sums(g, Eigen::Vector3d::Zero());
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[label[i]] += data[i].vec();
      ++counts[label[i]];
    }
    for (std::size_t z = 0; z < g; ++z) {
      if (counts[z] == 0) {
        const std::size_t far = farthest(counts);
        if (far == n) continue;
        --counts[label[far]];
        label[far] = z;
        similarity[far] = 1.0;
        counts[z] = 1;
        centers[z] = data[far].vec();
      } else if (sums[z].norm() > 0.0) {
        centers[z] = sums[z].normalized();
      }
    }
  }
  assign();
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[label[i]];
  for (std::size_t z = 0; z < g; ++z) {
    if (counts[z] > 0) continue;
    const std::size_t far = farthest(counts);
    if (far == n) throw FitError("initialize: cannot populate every cluster");
    --counts[label[far]];
    label[far] = z;
    similarity[far] = 1.0;
    counts[z] = 1;
  }

  std::vector<double> weights(g);
  std::vector<KentParams> comps;
  comps.reserve(g);
  std::vector<double> member(n);
  for (std::size_t z = 0; z < g; ++z) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      member[i] = label[i] == z ? 1.0 : 0.0;
      if (label[i] == z) sum += data[i].vec();
    }
    weights[z] = static_cast<double>(counts[z]) / static_cast<double>(n);
    std::optional<Frame3> frame;
    try {
      frame = moment_init_frame(data, member);
    } catch (const DegenerateDataError&) {
      frame = sample_uniform_frame(rng);
    }
    const double rbar = sum.norm() / static_cast<double>(counts[z]);
    comps.push_back(initial_shape(kappa_from_resultant(rbar, cfg), *frame, cfg));
  }
  // Renormalize away rounding in count / n.
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return MixtureModel(std::move(weights), std::move(comps));
}

MixtureModel random_start(const FitConfig& cfg, Rng& rng) {
  const auto g = static_cast<std::size_t>(cfg.g);
  std::vector<KentParams> comps;
  comps.reserve(g);
  for (std::size_t z = 0; z < g; ++z) {
    comps.emplace_back(std::max(1.0, cfg.bbar), std::max(10.0, 2.0 + cfg.kbar + 1e-3),
                       sample_uniform_frame(rng), cfg.floors());
  }
  return MixtureModel(std::vector<double>(g, 1.0 / static_cast<double>(g)), std::move(comps));
}

}  // namespace

void FitConfig::validate() const {
  if (g < 1) throw DomainError("FitConfig: g must be >= 1");
  if (max_iterations < 0) throw DomainError("FitConfig: max_iterations must be >= 0");
  if (!(rel_tol >= 0.0)) throw DomainError("FitConfig: rel_tol must be >= 0");
  if (restarts < 1) throw DomainError("FitConfig: restarts must be >= 1");
  if (!(bbar > 0.0) || !(kbar > 0.0)) throw DomainError("FitConfig: floors must be positive");
  if (!(kappa_max > 2.0 * bbar + kbar + 1e-3)) {
    throw DomainError("FitConfig: kappa_max leaves no room above the floors");
  }
  if (ascent.max_steps < 0 || ascent.max_halvings < 0 || !(ascent.initial_step > 0.0) ||
      !(ascent.backtrack_factor > 0.0 && ascent.backtrack_factor < 1.0) ||
      !(ascent.grad_tol > 0.0)) {
    throw DomainError("FitConfig: invalid ascent configuration");
  }
}

std::vector<BlockCoefficients> compute_block_coefficients(std::span<const UnitVector3> data,
                                                          const Responsibilities& resp,
                                                          const MixtureModel& model) {
  if (resp.n() != data.size() || resp.g() != model.g()) {
    throw DomainError("compute_block_coefficients: shape mismatch");
  }
  std::vector<BlockCoefficients> out(model.g());
  for (std::size_t z = 0; z < model.g(); ++z) {
    const std::span<const double> tau = column(resp, z);
    const Eigen::Matrix3d& f = model.component(z).frame().matrix();
    const Eigen::Vector3d xi1 = f.col(0);
    const Eigen::Vector3d xi2 = f.col(1);
    const Eigen::Vector3d xi3 = f.col(2);
    const double mass = pairwise_sum(tau);
    out[z].coef.a = 0.5 * mass;
    out[z].coef.b = pairwise_sum<double>(
        0, data.size(), [&](std::size_t i) { return tau[i] * (data[i].dot(xi1) - 1.0); });
    out[z].coef.c = pairwise_sum<double>(0, data.size(), [&](std::size_t i) {
      const double t2 = data[i].dot(xi2);
      const double t3 = data[i].dot(xi3);
      return tau[i] * (t2 * t2 - t3 * t3);
    });
    out[z].degenerate = !(mass > kDegenerateMass);
  }
  return out;
}

std::vector<double> update_weights(const Responsibilities& resp) {
  const auto n = static_cast<double>(resp.n());
  std::vector<double> w(resp.g());
  for (std::size_t z = 0; z < resp.g(); ++z) w[z] = pairwise_sum(column(resp, z)) / n;
  return w;
}

MixtureModel bslm_step(std::span<const UnitVector3> data, const MixtureModel& model, Block block,
                       const FitConfig& cfg, std::vector<std::string>* warnings) {
  const PosteriorPass pass = posterior_pass(data, model);
  return block == Block::shapes ? shapes_update(data, model, pass.resp, cfg, warnings)
                                : frames_update(data, model, pass.resp, cfg, warnings);
}

MixtureModel initialize(std::span<const UnitVector3> data, const FitConfig& cfg,
                        int restart_index) {
  cfg.validate();
  if (data.size() < static_cast<std::size_t>(cfg.g)) {
    throw DomainError(fmt::format("initialize: n = {} < g = {}", data.size(), cfg.g));
  }
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(restart_index)));
  return cfg.init_method == InitMethod::spherical_kmeans ? kmeans_start(data, cfg, rng)
                                                         : random_start(cfg, rng);
}

FitReport fit_from(std::span<const UnitVector3> data, const MixtureModel& start,
                   const FitConfig& cfg) {
  cfg.validate();
  FitReport report{start, 0.0, {}, {}, 0, false, 0, 0, {}, {}, {}};
  PosteriorPass pass = posterior_pass(data, start);
  report.initial_loglik = pass.log_likelihood;
  if (cfg.record_iterates) report.iterates.push_back(start);

  MixtureModel model = start;
  double previous = pass.log_likelihood;
  int calm = 0;
  for (int r = 1; r <= cfg.max_iterations; ++r) {
    MixtureModel shaped = shapes_update(data, model, pass.resp, cfg, &report.warnings);
    const PosteriorPass mid = posterior_pass(data, shaped);
    MixtureModel framed = frames_update(data, shaped, mid.resp, cfg, &report.warnings);
    pass = posterior_pass(data, framed);
    const double current = pass.log_likelihood;

    if (!is_monotone_step(previous, mid.log_likelihood) ||
        !is_monotone_step(mid.log_likelihood, current)) {
      ++report.monotonicity_violations;
    }
    report.loglik_trace.push_back(current);
    report.param_drift.push_back(parameter_distance(model, framed));
    report.iterations_run = r;
    model = std::move(framed);
    if (cfg.record_iterates) report.iterates.push_back(model);

    const double change = std::abs(current - previous) / (1.0 + std::abs(current));
    calm = change < cfg.rel_tol ? calm + 1 : 0;
    previous = current;
    if (calm >= 3) {
      report.converged = true;
      break;
    }
  }
  report.model = std::move(model);
  return report;
}

FitReport fit(std::span<const UnitVector3> data, const FitConfig& cfg) {
  cfg.validate();
  if (data.size() < static_cast<std::size_t>(cfg.g)) {
    throw DomainError(fmt::format("fit: n = {} < g = {}", data.size(), cfg.g));
  }
  std::optional<FitReport> best;
  std::vector<double> finals;
  std::vector<std::string> failures;
  for (int r = 0; r < cfg.restarts; ++r) {
    try {
      FitReport rep = fit_from(data, initialize(data, cfg, r), cfg);
      rep.restart_index_of_best = r;
      finals.push_back(rep.final_loglik());
      if (!std::isfinite(rep.final_loglik())) {
        failures.push_back(fmt::format("restart {}: non-finite log-likelihood", r));
        continue;
      }
      if (!best || rep.final_loglik() > best->final_loglik()) best = std::move(rep);
    } catch (const std::exception& e) {
      finals.push_back(-std::numeric_limits<double>::infinity());
      failures.push_back(fmt::format("restart {}: {}", r, e.what()));
    }
  }
  if (!best) {
    throw FitError(fmt::format("fit: all {} restarts failed{}", cfg.restarts,
                               failures.empty() ? "" : " (" + failures.front() + ")"));
  }
  best->restart_final_loglik = std::move(finals);
  best->warnings.insert(best->warnings.end(), failures.begin(), failures.end());
  return std::move(*best);
}

}  // namespace kentmix
