#include "kentmix/selection.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "kentmix/errors.hpp"

namespace kentmix {

double bic_penalty(int g, std::size_t n) {
  return 5.5 * static_cast<double>(g) * std::log(static_cast<double>(n));
}

double bic_criterion(double loglik, int g, std::size_t n) {
  if (g < 1 || n < 1) throw DomainError("bic_criterion: requires g >= 1 and n >= 1");
  return -loglik + bic_penalty(g, n);
}

const SelectionRow& SelectionTable::selected() const {
  for (const SelectionRow& row : rows) {
    if (row.g == selected_g) return row;
  }
  throw std::logic_error("SelectionTable: selected g not in table");
}

std::size_t argmin_criterion(std::span<const SelectionRow> rows) {
  if (rows.empty()) throw DomainError("argmin_criterion: empty table");
  std::size_t best = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].criterion < rows[best].criterion) best = k;
  }
  return best;
}

SelectionTable select_g(std::span<const UnitVector3> data, int g_min, int g_max,
                        const FitConfig& cfg) {
  if (g_min < 1 || g_min > g_max) {
    throw DomainError(fmt::format("select_g: invalid range [{}, {}]", g_min, g_max));
  }
  if (data.size() < static_cast<std::size_t>(g_max)) {
    throw DomainError(fmt::format("select_g: n = {} < g_max = {}", data.size(), g_max));
  }
  SelectionTable table;
  for (int g = g_min; g <= g_max; ++g) {
    FitConfig c = cfg;
    c.g = g;
    try {
      FitReport rep = fit(data, c);
      const double ll = rep.final_loglik();
      table.rows.push_back(SelectionRow{g, ll, bic_penalty(g, data.size()),
                                        bic_criterion(ll, g, data.size()), std::move(rep)});
    } catch (const std::exception& e) {
      table.warnings.push_back(fmt::format("g = {} excluded: {}", g, e.what()));
    }
  }
  if (table.rows.empty()) throw FitError("select_g: no value of g could be fitted");
  table.selected_g = table.rows[argmin_criterion(table.rows)].g;
  return table;
}

std::string selection_table_to_csv(const SelectionTable& table) {
  std::string out = "g,loglik,penalty,criterion,selected\n";
  for (const SelectionRow& row : table.rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{}\n", row.g, row.loglik, row.penalty,
                       row.criterion, row.g == table.selected_g ? 1 : 0);
  }
  return out;
}

Labeling map_classify(std::span<const UnitVector3> data, const MixtureModel& model) {
  Labeling out;
  out.labels.resize(data.size());
  std::vector<double> log_weight(model.g());
  for (std::size_t z = 0; z < model.g(); ++z) log_weight[z] = std::log(model.weight(z));
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < model.g(); ++z) {
      const double score = log_weight[z] + log_density_approx(data[i], model.component(z));
      if (score > best_score) {
        best_score = score;
        best = z;
      }
    }
    out.labels[i] = static_cast<int>(best) + 1;
  }
  return out;
}

double adjusted_rand_index(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) {
    throw DomainError(
        fmt::format("adjusted_rand_index: lengths differ ({} vs {})", a.size(), b.size()));
  }
  const std::size_t n = a.size();
  if (n < 2) return 1.0;

  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a.labels[i], b.labels[i]}] += 1.0;
    rows[a.labels[i]] += 1.0;
    cols[b.labels[i]] += 1.0;
  }
  auto pairs = [](double k) { return 0.5 * k * (k - 1.0); };
  double index = 0.0;
  for (const auto& [key, count] : cells) index += pairs(count);
  double sum_rows = 0.0;
  for (const auto& [key, count] : rows) sum_rows += pairs(count);
  double sum_cols = 0.0;
  for (const auto& [key, count] : cols) sum_cols += pairs(count);

  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  // Both partitions trivial (one block, or all singletons) and identical.
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

}  // namespace kentmix
