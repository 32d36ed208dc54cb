#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kentmix/bslm_fitter.hpp"
#include "kentmix/kent_model.hpp"

namespace kentmix {

/// Cluster labels, one per observation. Fitted labels are 1-based; 0 is
/// reserved for observations that could not be mapped to the sphere.
struct Labeling {
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  friend bool operator==(const Labeling&, const Labeling&) = default;
};

/// (11 g / 2) log n
double bic_penalty(int g, std::size_t n);

/// -loglik + (11 g / 2) log n, natural log.
double bic_criterion(double loglik, int g, std::size_t n);

struct SelectionRow {
  int g = 0;
  double loglik = 0.0;
  double penalty = 0.0;
  double criterion = 0.0;
  FitReport report;
};

struct SelectionTable {
  std::vector<SelectionRow> rows;  // ordered by g; failed fits are absent
  int selected_g = 0;
  std::vector<std::string> warnings;

  const SelectionRow& selected() const;
};

/// Index of the smallest criterion; ties go to the earliest (smallest g) row.
std::size_t argmin_criterion(std::span<const SelectionRow> rows);

/// Fits every g in [g_min, g_max] and picks the criterion minimizer.
/// Throws DomainError for a bad range or n < g_max, FitError if no g fits.
SelectionTable select_g(std::span<const UnitVector3> data, int g_min, int g_max,
                        const FitConfig& cfg);

/// CSV with header g,loglik,penalty,criterion,selected.
std::string selection_table_to_csv(const SelectionTable& table);

/// Plug-in MAP rule: argmax_z log pi_z + log f~(x; psi_z), ties to the
/// smallest index. Labels are 1-based.
Labeling map_classify(std::span<const UnitVector3> data, const MixtureModel& model);

/// Hubert-Arabie adjusted Rand index. Throws DomainError on length mismatch.
double adjusted_rand_index(const Labeling& a, const Labeling& b);

}  // namespace kentmix
