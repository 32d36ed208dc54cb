#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "kentmix/errors.hpp"
#include "kentmix/numeric.hpp"
#include "kentmix/special_fn.hpp"
#include "support/oracles.hpp"

using namespace kentmix;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

double log_vmf_normalizer(double kappa) {
  return std::log(4.0 * std::numbers::pi) + log_sinh(kappa) - std::log(kappa);
}

}  // namespace

TEST_CASE("numeric helpers") {
  CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(log_add_exp(-std::numeric_limits<double>::infinity(), 3.0) == 3.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  const double vals[] = {-1000.0, -1000.0, -1000.0};
  CHECK(log_sum_exp(vals) == doctest::Approx(-1000.0 + std::log(3.0)));
  CHECK(std::isinf(log_sum_exp(std::span<const double>{})));
  CHECK(log_sinh(1.0) == doctest::Approx(std::log(std::sinh(1.0))).epsilon(1e-14));
  CHECK(log_sinh(1e-8) == doctest::Approx(std::log(1e-8)).epsilon(1e-12));
  CHECK(log_sinh(800.0) == doctest::Approx(800.0 - std::log(2.0)).epsilon(1e-15));

  std::vector<double> v{0.1, 0.2, 0.3, 1e-17, 5.0, -2.5, 0.7};
  std::vector<double> vv = v;
  vv.insert(vv.end(), v.begin(), v.end());
  CHECK(pairwise_sum(vv) == 2.0 * pairwise_sum(v));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("log_bessel_i_half frozen values") {
  CHECK(log_bessel_i_half(0, 1.0).value == doctest::Approx(-0.0643519910735318).epsilon(1e-13));
  CHECK(log_bessel_i_half(0, 10.0).value == doctest::Approx(7.92976891823715).epsilon(1e-13));
  // Order 2i + 1/2 with i = 1 is I_{5/2}.
  CHECK(log_bessel_i_half(1, 2.0).value == doctest::Approx(-0.923750788683264).epsilon(1e-12));
  CHECK(log_bessel_i_half(2, 700.0).value == doctest::Approx(695.791225415097).epsilon(1e-13));
  CHECK(log_bessel_i_half(100, 50.0).value == doctest::Approx(-217.419963421594).epsilon(1e-11));
}

TEST_CASE("log_bessel_i_half agrees with the power-series oracle") {
  for (double x : {0.05, 0.5, 1.0, 3.0, 10.0, 40.0, 120.0}) {
    for (int i : {0, 1, 2, 5, 10, 25}) {
      const double got = log_bessel_i_half(i, x).value;
      const double want =
          static_cast<double>(oracle::log_bessel_i_series(2.0L * i + 0.5L, x));
      CHECK_MESSAGE(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)),
                    "i=" << i << " x=" << x);
    }
  }
}

TEST_CASE("log_bessel_i_half stays finite far past exp overflow") {
  for (double x : {700.0, 710.0, 5000.0, 1e5}) {
    const double v = log_bessel_i_half(3, x).value;
    CHECK(std::isfinite(v));
    // I_v(x) ~ e^x / sqrt(2 pi x) for x >> v^2.
    CHECK(v == doctest::Approx(x - 0.5 * std::log(2.0 * std::numbers::pi * x)).epsilon(1e-4));
  }
}

TEST_CASE("log_bessel_i_half_orders satisfies the three-term recurrence") {
  for (double x : {0.1, 0.7, 2.0, 9.0, 33.0, 100.0}) {
    const std::vector<double> l = log_bessel_i_half_orders(30, x);
    REQUIRE(l.size() == 31);
    for (int n = 1; n < 30; ++n) {
      const double v = n + 0.5;
      // I_{v-1} - I_{v+1} = (2v/x) I_v, checked relative to I_{v-1}.
      const double lhs = 1.0 - std::exp(l[n + 1] - l[n - 1]);
      const double rhs = (2.0 * v / x) * std::exp(l[n] - l[n - 1]);
      CHECK_MESSAGE(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs), "x=" << x << " n=" << n);
    }
  }
}

TEST_CASE("log_bessel_i_half domain errors") {
  CHECK_THROWS_AS(log_bessel_i_half(0, 0.0), DomainError);
  CHECK_THROWS_AS(log_bessel_i_half(0, -1.0), DomainError);
  CHECK_THROWS_AS(log_bessel_i_half(-1, 1.0), DomainError);
  CHECK_THROWS_AS(log_bessel_i_half(0, std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(log_bessel_i_half(0, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("exact normalizer frozen values") {
  struct Case {
    double beta, kappa, want;
  };
  const Case cases[] = {
      {0.0, 2.0, 3.12624443902351},   {0.0, 10.0, 9.53529197135415},
      {1.0, 10.0, 9.54999898984029},  {4.0, 10.0, 9.79718661472603},
      {1.0, 5.0, 5.27034568215720},   {10.0, 30.0, 28.6765250006331},
      {20.0, 50.0, 48.3420225454589}, {100.0, 300.0, 296.421066297017},
      {0.1, 0.5, 2.57365123116574},
  };
  for (const Case& c : cases) {
    const double got = log_kent_normalizer_exact(c.beta, c.kappa).value;
    CHECK_MESSAGE(std::abs(got - c.want) <= 1e-11 * (1.0 + std::abs(c.want)),
                  "beta=" << c.beta << " kappa=" << c.kappa << " got " << got);
  }
}

TEST_CASE("exact normalizer at beta = 0 is the vMF constant") {
  for (double k : {1e-3, 0.1, 1.0, 2.0, 10.0, 100.0, 700.0, 2000.0}) {
    CHECK(rel_err(log_kent_normalizer_exact(0.0, k).value, log_vmf_normalizer(k)) <= 1e-12);
  }
}

TEST_CASE("exact normalizer matches sphere quadrature") {
  for (auto [b, k] : {std::pair{1.0, 10.0}, {0.0, 1.0}, {1.0, 5.0}, {4.0, 10.0}, {10.0, 30.0}}) {
    const double quad = oracle::log_kent_kernel_integral(b, k);
    const double got = log_kent_normalizer_exact(b, k).value;
    CHECK_MESSAGE(std::abs(std::expm1(got - quad)) <= 1e-6, "beta=" << b << " kappa=" << k);
  }
}

TEST_CASE("exact normalizer dominates the vMF constant") {
  for (double k : {0.5, 3.0, 12.0, 80.0}) {
    for (double frac : {0.0, 0.1, 0.3, 0.45, 0.499}) {
      const double b = frac * k;
      CHECK(log_kent_normalizer_exact(b, k).value >= log_vmf_normalizer(k) - 1e-12);
    }
  }
}

TEST_CASE("exact normalizer is increasing in beta") {
  double prev = -std::numeric_limits<double>::infinity();
  for (double b = 0.0; b < 9.9; b += 0.5) {
    const double v = log_kent_normalizer_exact(b, 20.0).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("exact normalizer domain and convergence errors") {
  CHECK_THROWS_AS(log_kent_normalizer_exact(5.0, 10.0), DomainError);
  CHECK_THROWS_AS(log_kent_normalizer_exact(-0.1, 10.0), DomainError);
  CHECK_THROWS_AS(log_kent_normalizer_exact(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(log_kent_normalizer_exact(0.0, std::numeric_limits<double>::quiet_NaN()),
                  DomainError);
  // beta / kappa close to 1/2 converges too slowly for a tiny term cap.
  CHECK_THROWS_AS(log_kent_normalizer_exact(4.99, 10.0, 1e-12, 3), ConvergenceError);
}

TEST_CASE("approximate normalizer") {
  CHECK(log_kent_normalizer_approx(0.0, 10.0).value ==
        doctest::Approx(9.53529197341530).epsilon(1e-14));
  CHECK(log_kent_normalizer_approx(2.0, 10.0).value ==
        doctest::Approx(9.62246866698769).epsilon(1e-14));
  CHECK(std::isfinite(log_kent_normalizer_approx(1.0, 5000.0).value));
  CHECK_THROWS_AS(log_kent_normalizer_approx(5.0, 10.0), DomainError);
  CHECK_THROWS_AS(log_kent_normalizer_approx(0.0, -1.0), DomainError);
}

TEST_CASE("approximation gap at beta = 0 is exactly e^{-2 kappa}") {
  for (double k : {0.5, 2.0, 5.0, 10.0, 30.0}) {
    const double gap = log_kent_normalizer_approx(0.0, k).value -
                       log_kent_normalizer_exact(0.0, k).value;
    CHECK(std::abs(gap + std::log1p(-std::exp(-2.0 * k))) <= 1e-13);
  }
  const double g5 = std::expm1(log_kent_normalizer_approx(0.0, 5.0).value -
                               log_kent_normalizer_exact(0.0, 5.0).value);
  CHECK(std::abs(g5) == doctest::Approx(4.54e-5).epsilon(1e-2));
}

TEST_CASE("approximation gap shrinks as kappa grows at fixed beta/kappa") {
  for (double ratio : {0.05, 0.2, 0.4}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {10.0, 50.0, 100.0}) {
      const double gap = std::abs(std::expm1(log_kent_normalizer_approx(ratio * k, k).value -
                                             log_kent_normalizer_exact(ratio * k, k).value));
      CHECK(gap < prev);
      prev = gap;
    }
  }
}
