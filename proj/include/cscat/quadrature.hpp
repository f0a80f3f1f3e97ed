#pragma once

#include <span>
#include <vector>

namespace cscat {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// Composite Simpson rule on [lo, hi] whose panels break exactly at every
/// point in `breaks` that lies inside the interval. Each sub-interval gets an
/// even number of steps no wider than `max_step`.
QuadratureRule simpson_grid(double lo, double hi, double max_step, std::span<const double> breaks = {});

struct Extrapolation {
  double value = 0.0;
  /// |best - next-best| from the Neville tableau.
  double residual = 0.0;
};

/// Richardson extrapolation of f(h) -> f(0) for samples whose error expands in
/// powers of h^p (p = 2 for even expansions, e.g. central differences).
Extrapolation richardson_to_zero(std::span<const double> h, std::span<const double> f, int power = 2);

}  // namespace cscat
