#include "cscat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cscat/error.hpp"

namespace cscat {

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) {
    throw Error(ErrorKind::discretization, "Gauss-Legendre rule needs n >= 1");
  }
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo_idx = static_cast<std::size_t>(i);
    const auto hi_idx = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo_idx] = mid - half * x;
    rule.nodes[hi_idx] = mid + half * x;
    rule.weights[lo_idx] = half * w;
    rule.weights[hi_idx] = half * w;
  }
  return rule;
}

QuadratureRule simpson_grid(double lo, double hi, double max_step, std::span<const double> breaks) {
  if (!(hi > lo) || !(max_step > 0.0)) {
    throw Error(ErrorKind::discretization, "Simpson grid needs hi > lo and a positive step");
  }
  std::vector<double> cuts{lo};
  std::vector<double> inner(breaks.begin(), breaks.end());
  std::sort(inner.begin(), inner.end());
  for (double b : inner) {
    if (b > cuts.back() && b < hi) {
      cuts.push_back(b);
    }
  }
  cuts.push_back(hi);

  QuadratureRule rule;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    auto steps = static_cast<std::size_t>(std::ceil((b - a) / max_step));
    steps = std::max<std::size_t>(2, steps + (steps % 2));
    const double h = (b - a) / static_cast<double>(steps);
    const std::size_t first = rule.nodes.empty() ? 0 : 1;
    if (first == 1) {
      // Shared break node: add this panel's end weight to it.
      rule.weights.back() += h / 3.0;
    }
    for (std::size_t i = first; i <= steps; ++i) {
      const double x = i == steps ? b : a + h * static_cast<double>(i);
      double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      rule.nodes.push_back(x);
      rule.weights.push_back(w * h / 3.0);
    }
  }
  return rule;
}

Extrapolation richardson_to_zero(std::span<const double> h, std::span<const double> f, int power) {
  const auto n = h.size();
  if (n != f.size() || n < 2) {
    throw Error(ErrorKind::extrapolation_failure, "Richardson needs at least two matched samples");
  }
  // Neville tableau for a polynomial in h^power evaluated at 0.
  std::vector<double> t(f.begin(), f.end());
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = std::pow(h[i], power);
  }
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double denom = z[i] - z[i + m];
      if (denom == 0.0) {
        throw Error(ErrorKind::extrapolation_failure, "duplicate step sizes");
      }
      t[i] = (z[i] * t[i + 1] - z[i + m] * t[i]) / denom;
    }
  }
  // t[0] now holds the highest-order estimate; compare with the best estimate
  // of one order lower built from the finest samples.
  std::vector<double> lower(f.begin() + 1, f.end());
  std::vector<double> zl(z.begin() + 1, z.end());
  for (std::size_t m = 1; m < lower.size(); ++m) {
    for (std::size_t i = 0; i + m < lower.size(); ++i) {
      lower[i] = (zl[i] * lower[i + 1] - zl[i + m] * lower[i]) / (zl[i] - zl[i + m]);
    }
  }
  return {t[0], std::abs(t[0] - lower[0])};
}

}  // namespace cscat
