#include "kentmix/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "kentmix/errors.hpp"

namespace kentmix {
namespace {

// Orthonormal completion (u, v) of a unit vector mu.
std::pair<Eigen::Vector3d, Eigen::Vector3d> complete_basis(const Eigen::Vector3d& mu) {
  int k = 0;
  mu.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d u = Eigen::Vector3d::Unit(k) - mu[k] * mu;
  u.normalize();
  return {u, mu.cross(u)};
}

MixtureModel axis_mixture(const std::vector<Eigen::Vector3d>& means, double kappa,
                          double beta_floor) {
  std::vector<KentParams> comps;
  for (const Eigen::Vector3d& mu : means) {
    const auto [u, v] = complete_basis(mu);
    Eigen::Matrix3d f;
    f << mu, u, v;
    comps.emplace_back(beta_floor, kappa, Frame3(f), ShapeFloors{beta_floor, kDefaultGapFloor});
  }
  const double w = 1.0 / static_cast<double>(means.size());
  return MixtureModel(std::vector<double>(means.size(), w), std::move(comps));
}

// Per-replication generator streams.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kFitStream = 1;

RepRecord run_rep(const StudySpec& spec, const FitConfig& base, int rep, int g_min, int g_max) {
  RepRecord rec;
  rec.rep = rep;
  const std::uint64_t rep_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
  Rng rng(derive_seed(rep_seed, kDataStream));

  FitConfig cfg = base;
  cfg.seed = derive_seed(rep_seed, kFitStream);
  const double beta_floor = cfg.bbar;

  const MixtureModel truth = study_truth(spec.study, rng, beta_floor);
  const LabeledSample sample = generate_mixture_sample(truth, spec.n, rng, beta_floor);

  if (spec.study == Study::S3) {
    const SelectionTable table = select_g(sample.points, g_min, g_max, cfg);
    rec.selected_g = table.selected_g;
    for (const SelectionRow& row : table.rows) {
      rec.criterion.emplace_back(row.g, row.criterion);
      rec.monotonicity_violations += row.report.monotonicity_violations;
    }
    rec.final_loglik = table.selected().loglik;
    return rec;
  }

  cfg.g = static_cast<int>(truth.g());
  const FitReport report = fit(sample.points, cfg);
  rec.final_loglik = report.final_loglik();
  rec.monotonicity_violations = report.monotonicity_violations;
  const MixtureModel& fitted = report.model;

  const std::vector<std::size_t> match = match_components(fitted, truth);
  rec.sq_err_xi.resize(truth.g());
  for (std::size_t z = 0; z < truth.g(); ++z) {
    const std::size_t j = match[z];
    const double dpi = fitted.weight(j) - truth.weight(z);
    const double dk = fitted.component(j).kappa() - truth.component(z).kappa();
    rec.sq_err_pi += dpi * dpi;
    rec.sq_err_kappa += dk * dk;
    const Eigen::Vector3d xi_true = truth.component(z).frame().xi1();
    Eigen::Vector3d xi_hat = fitted.component(j).frame().xi1();
    if (xi_hat.dot(xi_true) < 0.0) xi_hat = -xi_hat;
    rec.sq_err_xi[z] = (xi_hat - xi_true).squaredNorm();
  }
  if (spec.study == Study::S4) {
    rec.ari = adjusted_rand_index(map_classify(sample.points, fitted), sample.labels);
  }
  return rec;
}

}  // namespace

std::vector<UnitVector3> sample_vmf(const UnitVector3& mu, double kappa, std::size_t n, Rng& rng) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError(fmt::format("sample_vmf: kappa must be positive, got {}", kappa));
  }
  const auto [u, v] = complete_basis(mu.vec());
  const double tail = std::exp(-2.0 * kappa);
  std::vector<UnitVector3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = rng.uniform_open_low();
    double w = 1.0 + std::log(p + (1.0 - p) * tail) / kappa;
    w = std::clamp(w, -1.0, 1.0);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
    const Eigen::Vector3d x = w * mu.vec() + s * std::cos(phi) * u + s * std::sin(phi) * v;
    out.push_back(UnitVector3::normalized(x));
  }
  return out;
}

Frame3 sample_uniform_frame(Rng& rng) {
  for (;;) {
    Eigen::Matrix3d a;
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) a(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
    const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::Matrix3d q = qr.householderQ();
    bool singular = false;
    for (int j = 0; j < 3; ++j) {
      if (r(j, j) == 0.0) singular = true;
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    if (!singular) return Frame3(q);
  }
}

LabeledSample generate_mixture_sample(const MixtureModel& model, std::size_t n, Rng& rng,
                                      double beta_floor) {
  for (std::size_t z = 0; z < model.g(); ++z) {
    if (model.component(z).beta() > beta_floor) {
      throw UnsupportedSamplingError(fmt::format(
          "generate_mixture_sample: component {} has beta = {}; only von Mises-Fisher "
          "components can be sampled",
          z + 1, model.component(z).beta()));
    }
  }
  LabeledSample out;
  out.points.reserve(n);
  out.labels.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t z = rng.categorical(model.weights());
    const KentParams& c = model.component(z);
    out.points.push_back(sample_vmf(UnitVector3::normalized(c.frame().xi1()), c.kappa(), 1, rng)[0]);
    out.labels.labels.push_back(static_cast<int>(z) + 1);
  }
  return out;
}

Study parse_study(const std::string& name) {
  if (name == "s1" || name == "S1") return Study::S1;
  if (name == "s2" || name == "S2") return Study::S2;
  if (name == "s3" || name == "S3") return Study::S3;
  if (name == "s4" || name == "S4") return Study::S4;
  throw DomainError(fmt::format("unknown study '{}'", name));
}

std::string study_name(Study s) {
  switch (s) {
    case Study::S1: return "s1";
    case Study::S2: return "s2";
    case Study::S3: return "s3";
    case Study::S4: return "s4";
  }
  return "?";
}

MixtureModel study_truth(Study study, Rng& rng, double beta_floor) {
  const Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e2 = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
  switch (study) {
    case Study::S1:
    case Study::S4:
      return axis_mixture({e1, e2, e3}, 10.0, beta_floor);
    case Study::S2:
      return axis_mixture({-e1, -e2, -e3, e1, e2, e3}, 20.0, beta_floor);
    case Study::S3: {
      constexpr int kComponents = 5;
      std::vector<KentParams> comps;
      for (int z = 0; z < kComponents; ++z) {
        comps.emplace_back(beta_floor, 10.0, sample_uniform_frame(rng),
                           ShapeFloors{beta_floor, kDefaultGapFloor});
      }
      return MixtureModel(std::vector<double>(kComponents, 1.0 / kComponents), std::move(comps));
    }
  }
  throw std::logic_error("study_truth: unknown study");
}

std::vector<std::size_t> match_components(const MixtureModel& fitted, const MixtureModel& truth) {
  const std::size_t gf = fitted.g();
  const std::size_t gt = truth.g();
  if (gf < gt) throw DomainError("match_components: fewer fitted than true components");
  std::vector<std::size_t> match(gt, gf);
  std::vector<bool> fitted_used(gf, false);
  for (std::size_t round = 0; round < gt; ++round) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bz = 0;
    std::size_t bj = 0;
    for (std::size_t z = 0; z < gt; ++z) {
      if (match[z] != gf) continue;
      for (std::size_t j = 0; j < gf; ++j) {
        if (fitted_used[j]) continue;
        const double closeness =
            fitted.component(j).frame().xi1().dot(truth.component(z).frame().xi1());
        if (closeness > best) {
          best = closeness;
          bz = z;
          bj = j;
        }
      }
    }
    match[bz] = bj;
    fitted_used[bj] = true;
  }
  return match;
}

StudyResult run_study(const StudySpec& spec, const FitConfig& cfg, int g_min, int g_max) {
  if (spec.n < 1 || spec.reps < 1) throw DomainError("run_study: n and reps must be >= 1");
  StudyResult result;
  result.spec = spec;
  {
    Rng probe(0);
    result.g_true = static_cast<int>(study_truth(spec.study, probe, cfg.bbar).g());
  }

  for (int rep = 0; rep < spec.reps; ++rep) {
    try {
      result.per_rep.push_back(run_rep(spec, cfg, rep, g_min, g_max));
    } catch (const std::exception& e) {
      RepRecord rec;
      rec.rep = rep;
      rec.failed = true;
      rec.error = e.what();
      result.per_rep.push_back(std::move(rec));
      ++result.failures;
    }
  }

  const auto g = static_cast<std::size_t>(result.g_true);
  int ok = 0;
  result.mse_xi.assign(spec.study == Study::S3 ? 0 : g, 0.0);
  std::map<int, int> criterion_counts;
  for (const RepRecord& rec : result.per_rep) {
    if (rec.failed) continue;
    ++ok;
    if (spec.study == Study::S3) {
      ++result.bic_selection_counts[rec.selected_g];
      for (const auto& [gg, crit] : rec.criterion) {
        result.mean_criterion[gg] += crit;
        ++criterion_counts[gg];
      }
      continue;
    }
    result.mse_pi += rec.sq_err_pi;
    result.mse_kappa += rec.sq_err_kappa;
    for (std::size_t z = 0; z < g; ++z) result.mse_xi[z] += rec.sq_err_xi[z];
    result.ari_mean += rec.ari;
  }
  if (ok > 0) {
    const double reps = ok;
    result.mse_pi /= reps * static_cast<double>(g);
    result.mse_kappa /= reps * static_cast<double>(g);
    for (double& v : result.mse_xi) v /= reps;
    result.ari_mean /= reps;
    for (auto& [gg, total] : result.mean_criterion) total /= criterion_counts[gg];
  }
  return result;
}

std::string study_result_to_json(const StudyResult& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["study"] = study_name(r.spec.study);
  j["n"] = r.spec.n;
  j["reps"] = r.spec.reps;
  j["seed"] = r.spec.seed;
  j["g_true"] = r.g_true;
  j["failures"] = r.failures;
  if (r.spec.study == Study::S3) {
    ordered_json counts = ordered_json::object();
    for (const auto& [g, c] : r.bic_selection_counts) counts[std::to_string(g)] = c;
    j["bic_selection_counts"] = counts;
    ordered_json crit = ordered_json::object();
    for (const auto& [g, c] : r.mean_criterion) crit[std::to_string(g)] = c;
    j["mean_criterion"] = crit;
  } else {
    j["mse_pi"] = r.mse_pi;
    j["mse_kappa"] = r.mse_kappa;
    j["mse_xi"] = r.mse_xi;
    if (r.spec.study == Study::S4) j["ari_mean"] = r.ari_mean;
  }
  ordered_json reps = ordered_json::array();
  for (const RepRecord& rec : r.per_rep) {
    ordered_json e;
    e["rep"] = rec.rep;
    e["failed"] = rec.failed;
    if (rec.failed) {
      e["error"] = rec.error;
      reps.push_back(e);
      continue;
    }
    e["final_loglik"] = rec.final_loglik;
    e["monotonicity_violations"] = rec.monotonicity_violations;
    if (r.spec.study == Study::S3) {
      e["selected_g"] = rec.selected_g;
      ordered_json crit = ordered_json::object();
      for (const auto& [g, c] : rec.criterion) crit[std::to_string(g)] = c;
      e["criterion"] = crit;
    } else {
      e["sq_err_pi"] = rec.sq_err_pi;
      e["sq_err_kappa"] = rec.sq_err_kappa;
      e["sq_err_xi"] = rec.sq_err_xi;
      if (r.spec.study == Study::S4) e["ari"] = rec.ari;
    }
    reps.push_back(e);
  }
  j["per_rep"] = reps;
  return j.dump(2) + "\n";
}

}  // namespace kentmix
