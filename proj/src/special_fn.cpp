#include "kentmix/special_fn.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "kentmix/errors.hpp"
#include "kentmix/numeric.hpp"

namespace kentmix {
namespace {

void check_argument(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(fmt::format("{}: argument must be finite and positive, got {}", what, x));
  }
}

void check_shape(double beta, double kappa, const char* what) {
  if (!std::isfinite(beta) || !std::isfinite(kappa) || beta < 0.0 || kappa <= 0.0 ||
      !(2.0 * beta < kappa)) {
    throw DomainError(
        fmt::format("{}: requires 0 <= 2*beta < kappa, got beta={} kappa={}", what, beta, kappa));
  }
}

}  // namespace

std::vector<double> log_bessel_i_half_orders(int max_n, double x) {
  check_argument(x, "log_bessel_i_half_orders");
  if (max_n < 0) throw DomainError("log_bessel_i_half_orders: max_n must be nonnegative");

  std::vector<double> out(static_cast<std::size_t>(max_n) + 1);
  // I_{1/2}(x) = sqrt(2 / (pi x)) sinh(x)
  out[0] = 0.5 * std::log(2.0 / (std::numbers::pi * x)) + log_sinh(x);
  if (max_n == 0) return out;

  // r_k = I_{k+3/2}(x) / I_{k+1/2}(x) satisfies r_k = 1 / (2(k + 3/2)/x + r_{k+1}).
  // Starting well past both max_n and x, the recurrence is contracting and the
  // Amos-type starting estimate is forgotten long before k reaches max_n.
  const int start = max_n + static_cast<int>(std::ceil(x)) + 64;
  const double nu = start + 1.5;
  double r = x / (nu + std::sqrt(nu * nu + x * x));
  std::vector<double> log_ratio(static_cast<std::size_t>(max_n));
  for (int k = start - 1; k >= 0; --k) {
    r = 1.0 / (2.0 * (k + 1.5) / x + r);
    if (k < max_n) log_ratio[static_cast<std::size_t>(k)] = std::log(r);
  }
  for (int k = 1; k <= max_n; ++k) {
    out[static_cast<std::size_t>(k)] =
        out[static_cast<std::size_t>(k) - 1] + log_ratio[static_cast<std::size_t>(k) - 1];
  }
  return out;
}

LogValue log_bessel_i_half(int i, double kappa) {
  if (i < 0) throw DomainError("log_bessel_i_half: order index must be nonnegative");
  check_argument(kappa, "log_bessel_i_half");
  return LogValue{log_bessel_i_half_orders(2 * i, kappa).back()};
}

LogValue log_kent_normalizer_exact(double beta, double kappa, double rel_tol, int max_terms) {
  check_shape(beta, kappa, "log_kent_normalizer_exact");
  if (!(rel_tol > 0.0)) throw DomainError("log_kent_normalizer_exact: rel_tol must be positive");
  if (max_terms < 1) throw DomainError("log_kent_normalizer_exact: max_terms must be >= 1");

  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  const double log_half_kappa = std::log(0.5 * kappa);

  if (beta == 0.0) {
    // Only the i = 0 term survives: 4 pi sinh(kappa) / kappa.
    return LogValue{std::log(4.0 * std::numbers::pi) + log_sinh(kappa) - std::log(kappa)};
  }

  const double log_beta = std::log(beta);
  const std::vector<double> log_bessel = log_bessel_i_half_orders(2 * (max_terms - 1), kappa);
  const double log_rel_tol = std::log(rel_tol);

  double acc = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < max_terms; ++i) {
    const double term = std::lgamma(i + 0.5) - std::lgamma(i + 1.0) + 2.0 * i * log_beta -
                        (2.0 * i + 0.5) * log_half_kappa +
                        log_bessel[static_cast<std::size_t>(2 * i)];
    acc = log_add_exp(acc, term);
    if (i > 0 && term - acc < log_rel_tol) return LogValue{log_two_pi + acc};
  }
  throw ConvergenceError(fmt::format(
      "log_kent_normalizer_exact: series did not converge in {} terms (beta={}, kappa={})",
      max_terms, beta, kappa));
}

LogValue log_kent_normalizer_approx(double beta, double kappa) {
  check_shape(beta, kappa, "log_kent_normalizer_approx");
  // kappa^2 - 4 beta^2 factored to avoid cancellation
  return LogValue{std::log(2.0 * std::numbers::pi) + kappa -
                  0.5 * (std::log(kappa - 2.0 * beta) + std::log(kappa + 2.0 * beta))};
}

}  // namespace kentmix
