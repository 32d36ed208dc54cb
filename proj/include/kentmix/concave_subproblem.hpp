#pragma once

namespace kentmix {

inline constexpr double kDefaultKappaMax = 700.0;

/// Coefficients of a log(kappa^2 - 4 beta^2) + b kappa + c beta.
struct ShapeCoefficients {
  double a = 0.0;  // half the component's responsibility mass
  double b = 0.0;  // sum tau (x.xi1 - 1), never positive from data
  double c = 0.0;  // sum tau ((x.xi2)^2 - (x.xi3)^2)
};

struct ShapeSolution {
  double beta = 0.0;
  double kappa = 0.0;
  double objective = 0.0;
  bool on_beta_floor = false;    // beta == bbar
  bool on_gap_floor = false;     // kappa - 2 beta == kbar
  bool on_kappa_cap = false;     // kappa == kappa_max
};

double shape_objective(const ShapeCoefficients& coef, double beta, double kappa);

/// Global maximizer of the concave shape objective over
///   beta >= bbar,  kappa - 2 beta >= kbar,  kappa <= kappa_max.
///
/// The stationary point kappa = -8ab / (4b^2 - c^2), beta = 2ac / (4b^2 - c^2)
/// is returned when it is strictly feasible. Otherwise each edge of the
/// feasible triangle is maximized by safeguarded Newton on its 1-D
/// derivative and the best edge point wins (ties go to smaller kappa).
///
/// Throws DomainError if a <= 0, a non-finite coefficient, or infeasible
/// floors; UnboundedObjectiveError if b >= 0.
ShapeSolution solve_shape(const ShapeCoefficients& coef, double bbar, double kbar,
                          double kappa_max = kDefaultKappaMax);

}  // namespace kentmix
