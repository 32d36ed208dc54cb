#pragma once

#include <cmath>
#include <vector>

namespace kentmix {

/// Natural log of a positive quantity.
struct LogValue {
  double value = 0.0;

  [[nodiscard]] double exp() const { return std::exp(value); }
};

inline constexpr double kDefaultNormalizerRelTol = 1e-12;
inline constexpr int kDefaultNormalizerMaxTerms = 200;

/// log I_{2i+1/2}(kappa). Works in the exponentially scaled domain, so
/// arguments well past 700 do not overflow.
LogValue log_bessel_i_half(int i, double kappa);

/// log I_{n+1/2}(x) for n = 0 .. max_n, from log I_{1/2} and the ratios
/// I_{v+1}/I_v obtained by backward recurrence.
std::vector<double> log_bessel_i_half_orders(int max_n, double x);

/// Log of the Kent normalizing constant
///   2 pi sum_{i>=0} Gamma(i+1/2)/Gamma(i+1) beta^{2i} (kappa/2)^{-2i-1/2} I_{2i+1/2}(kappa).
///
/// Summation starts at i = 0 so that beta = 0 gives the von Mises-Fisher
/// constant 4 pi sinh(kappa) / kappa. Terms are accumulated with log-sum-exp
/// until a term's share of the running sum drops below rel_tol.
///
/// Throws DomainError unless 0 <= 2 beta < kappa, and ConvergenceError if
/// max_terms terms are not enough.
LogValue log_kent_normalizer_exact(double beta, double kappa,
                                   double rel_tol = kDefaultNormalizerRelTol,
                                   int max_terms = kDefaultNormalizerMaxTerms);

/// Log of the large-kappa normalizer 2 pi e^kappa / sqrt(kappa^2 - 4 beta^2).
LogValue log_kent_normalizer_approx(double beta, double kappa);

}  // namespace kentmix
