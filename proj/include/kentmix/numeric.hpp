#pragma once

#include <cstddef>
#include <span>

namespace kentmix {

/// log(exp(a) + exp(b)) without overflow; -inf operands are allowed.
double log_add_exp(double a, double b);

/// log(sum(exp(values))). Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

/// log(sinh(x)) for x > 0.
double log_sinh(double x);

/// Sum of term(begin) .. term(end - 1) by recursive halving.
///
/// The reduction tree depends only on the index range, so results are
/// reproducible and a concatenated copy [v, v] sums to exactly 2 * sum(v).
template <class T, class Term>
T pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  if (end - begin == 1) return term(begin);
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

/// Pairwise sum of a span; 0 for an empty span.
double pairwise_sum(std::span<const double> values);

}  // namespace kentmix
