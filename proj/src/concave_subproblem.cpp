#include "kentmix/concave_subproblem.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "kentmix/errors.hpp"

namespace kentmix {
namespace {

struct Point {
  double beta;
  double kappa;
};

// First and second directional derivatives of the objective along (db, dk).
struct Slope {
  double first;
  double second;
};

Slope directional(const ShapeCoefficients& coef, Point p, double db, double dk) {
  const double d = p.kappa * p.kappa - 4.0 * p.beta * p.beta;
  const double dd = 2.0 * p.kappa * dk - 8.0 * p.beta * db;  // derivative of d along the line
  const double ddd = 2.0 * dk * dk - 8.0 * db * db;
  return {coef.a * dd / d + coef.b * dk + coef.c * db,
          coef.a * (ddd * d - dd * dd) / (d * d)};
}

// Maximize the concave objective on the segment start + t (db, dk), t in [0, len].
Point maximize_on_segment(const ShapeCoefficients& coef, Point start, double db, double dk,
                          double len) {
  auto at = [&](double t) { return Point{start.beta + t * db, start.kappa + t * dk}; };
  if (len <= 0.0) return start;
  if (directional(coef, start, db, dk).first <= 0.0) return start;
  if (directional(coef, at(len), db, dk).first >= 0.0) return at(len);

  double lo = 0.0;
  double hi = len;
  double t = 0.5 * len;
  for (int iter = 0; iter < 200; ++iter) {
    const Slope s = directional(coef, at(t), db, dk);
    if (s.first == 0.0) break;
    if (s.first > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = (s.second < 0.0) ? t - s.first / s.second : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + hi)) {
      t = next;
      break;
    }
    t = next;
  }
  return at(t);
}

}  // namespace

double shape_objective(const ShapeCoefficients& coef, double beta, double kappa) {
  return coef.a * (std::log(kappa - 2.0 * beta) + std::log(kappa + 2.0 * beta)) +
         coef.b * kappa + coef.c * beta;
}

ShapeSolution solve_shape(const ShapeCoefficients& coef, double bbar, double kbar,
                          double kappa_max) {
  const auto [a, b, c] = coef;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("solve_shape: non-finite coefficients");
  }
  if (!(a > 0.0)) throw DomainError(fmt::format("solve_shape: a must be positive, got {}", a));
  if (b >= 0.0) {
    throw UnboundedObjectiveError(
        fmt::format("solve_shape: b = {} >= 0, objective is unbounded in kappa", b));
  }
  if (!(bbar > 0.0) || !(kbar > 0.0) || !(kappa_max >= 2.0 * bbar + kbar)) {
    throw DomainError("solve_shape: floors leave an empty feasible set");
  }

  auto finish = [&](Point p) {
    // Rounding in 2 beta + kbar can leave the gap a hair under its floor.
    p.beta = std::max(p.beta, bbar);
    p.kappa = std::min(p.kappa, kappa_max);
    while (p.kappa - 2.0 * p.beta < kbar) {
      if (p.kappa < kappa_max) {
        p.kappa = std::nextafter(p.kappa, kappa_max);
      } else {
        p.beta = std::nextafter(p.beta, 0.0);
      }
    }
    ShapeSolution s;
    s.beta = p.beta;
    s.kappa = p.kappa;
    s.objective = shape_objective(coef, p.beta, p.kappa);
    s.on_beta_floor = p.beta == bbar;
    s.on_gap_floor = p.kappa - 2.0 * p.beta - kbar <= 1e-12 * (1.0 + p.kappa);
    s.on_kappa_cap = p.kappa == kappa_max;
    return s;
  };

  const double det = 4.0 * b * b - c * c;
  if (det > 0.0) {
    const Point interior{2.0 * a * c / det, -8.0 * a * b / det};
    if (interior.beta > bbar && interior.kappa - 2.0 * interior.beta > kbar &&
        interior.kappa < kappa_max) {
      return finish(interior);
    }
  }

  // Vertices of the feasible triangle.
  const Point corner_low{bbar, 2.0 * bbar + kbar};
  const Point corner_cap{bbar, kappa_max};
  const double beta_top = 0.5 * (kappa_max - kbar);

  const std::array<Point, 3> candidates = {
      // beta = bbar, kappa increasing from the gap floor to the cap
      maximize_on_segment(coef, corner_low, 0.0, 1.0, kappa_max - corner_low.kappa),
      // kappa = 2 beta + kbar, beta increasing from bbar
      maximize_on_segment(coef, corner_low, 1.0, 2.0, beta_top - bbar),
      // kappa = kappa_max, beta increasing from bbar
      maximize_on_segment(coef, corner_cap, 1.0, 0.0, beta_top - bbar),
  };

  std::optional<ShapeSolution> best;
  for (const Point& p : candidates) {
    ShapeSolution s = finish(p);
    if (!std::isfinite(s.objective)) continue;
    if (!best) {
      best = s;
      continue;
    }
    const double slack = 1e-14 * (1.0 + std::abs(best->objective));
    if (s.objective > best->objective + slack ||
        (std::abs(s.objective - best->objective) <= slack && s.kappa < best->kappa)) {
      best = s;
    }
  }
  if (!best) throw std::logic_error("solve_shape: no feasible candidate");
  return *best;
}

}  // namespace kentmix
