#include "kentmix/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kentmix {

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> values) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (values.empty()) return kNegInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_sinh(double x) {
  // sinh(x) = e^x (1 - e^{-2x}) / 2
  return x - std::log(2.0) + std::log(-std::expm1(-2.0 * x));
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum<double>(0, values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace kentmix
