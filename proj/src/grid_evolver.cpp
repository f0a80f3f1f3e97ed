#include "cscat/grid_evolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cscat/error.hpp"

namespace cscat {

namespace {

double node_potential(const PotentialSpec& spec, double x, double dx) {
  const double tol = 1e-9 * dx;
  for (double e : spec.edges()) {
    if (std::abs(x - e) <= tol) {
      return 0.5 * (spec(e - 0.5 * dx) + spec(e + 0.5 * dx));
    }
  }
  return spec(x);
}

}  // namespace

GridEvolver::GridEvolver(const PotentialSpec& spec, double x_min, double dx, std::size_t n, double dt, double k_max,
                         GridBudget budget)
    : dx_(dx), dt_(dt) {
  if (!(dx > 0.0) || !(dt > 0.0) || n < 5) {
    throw Error(ErrorKind::discretization, "grid needs dx > 0, dt > 0 and at least 5 nodes");
  }
  double v_max = 0.0;
  for (const auto& s : spec.segments()) {
    v_max = std::max(v_max, std::abs(s.height));
  }
  const double omega = std::max(k_max * k_max, v_max);
  if (k_max * dx > budget.max_k_dx) {
    throw Error(ErrorKind::discretization,
                "k_max dx = " + std::to_string(k_max * dx) + " exceeds " + std::to_string(budget.max_k_dx));
  }
  if (omega * dt > budget.max_omega_dt) {
    throw Error(ErrorKind::discretization,
                "omega dt = " + std::to_string(omega * dt) + " exceeds " + std::to_string(budget.max_omega_dt));
  }

  x_.resize(n);
  v_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = x_min + static_cast<double>(i) * dx;
    v_[i] = node_potential(spec, x_[i], dx);
  }

  const double inv_dx2 = 1.0 / (dx * dx);
  k_diag_.resize(n);
  k_off_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k_diag_[i] = 2.0 * inv_dx2 + 10.0 / 12.0 * v_[i];
    if (i + 1 < n) {
      k_off_[i] = -inv_dx2 + (v_[i] + v_[i + 1]) / 24.0;
    }
  }

  // Thomas factorization on interior nodes 1..n-2.
  const cplx itau(0.0, 0.5 * dt);
  lu_diag_inv_.assign(n, 0.0);
  lu_upper_.assign(n, 0.0);
  cplx prev_upper = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const cplx diag = 10.0 / 12.0 + itau * k_diag_[i];
    const cplx lower = i > 1 ? cplx(1.0 / 12.0) + itau * k_off_[i - 1] : cplx(0.0);
    const cplx upper = 1.0 / 12.0 + itau * k_off_[i];
    const cplx d = diag - lower * prev_upper;
    lu_diag_inv_[i] = 1.0 / d;
    lu_upper_[i] = upper * lu_diag_inv_[i];
    prev_upper = lu_upper_[i];
  }
  rhs_.resize(n);
}

void GridEvolver::step(std::vector<cplx>& psi) const {
  const std::size_t n = x_.size();
  const cplx itau(0.0, 0.5 * dt_);
  psi.front() = 0.0;
  psi.back() = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const cplx lo = (1.0 / 12.0) - itau * k_off_[i - 1];
    const cplx di = (10.0 / 12.0) - itau * k_diag_[i];
    const cplx up = (1.0 / 12.0) - itau * k_off_[i];
    rhs_[i] = lo * psi[i - 1] + di * psi[i] + up * psi[i + 1];
  }
  // Forward sweep; lower coefficient of row i is (1/12 + i tau k_off[i-1]).
  cplx carry = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const cplx lower = i > 1 ? cplx(1.0 / 12.0) + itau * k_off_[i - 1] : cplx(0.0);
    carry = (rhs_[i] - lower * carry) * lu_diag_inv_[i];
    rhs_[i] = carry;
  }
  psi[n - 2] = rhs_[n - 2];
  for (std::size_t i = n - 2; i-- > 1;) {
    psi[i] = rhs_[i] - lu_upper_[i] * psi[i + 1];
  }
}

void GridEvolver::advance(std::vector<cplx>& psi, std::size_t steps) const {
  for (std::size_t s = 0; s < steps; ++s) {
    step(psi);
  }
}

double GridEvolver::norm(std::span<const cplx> psi) const {
  double s = 0.0;
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx m = (10.0 / 12.0) * psi[i];
    if (i > 0) {
      m += psi[i - 1] / 12.0;
    }
    if (i + 1 < n) {
      m += psi[i + 1] / 12.0;
    }
    s += (std::conj(psi[i]) * m).real();
  }
  return s * dx_;
}

WavePacketField grid_evolve_oracle(const WavePacketField& initial, const PotentialSpec& spec, double dt,
                                   std::size_t steps, double k_max, GridBudget budget) {
  const auto& x = initial.x;
  if (x.size() < 5) {
    throw Error(ErrorKind::discretization, "initial field needs at least 5 samples");
  }
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs(x[i] - x[i - 1] - dx) > 1e-9 * dx) {
      throw Error(ErrorKind::discretization, "grid oracle needs a uniform x-grid");
    }
  }
  GridEvolver ev(spec, x.front(), dx, x.size(), dt, k_max, budget);
  WavePacketField out = initial;
  ev.advance(out.psi, steps);
  out.t = initial.t + dt * static_cast<double>(steps);
  return out;
}

double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    s += std::norm(a[i] - b[i]);
  }
  return std::sqrt(s * dx);
}

cplx free_gaussian(double x, double t, double k0, double sigma_x, double x0) {
  const double s2 = sigma_x * sigma_x;
  const cplx q(s2, t);
  const double pref = std::pow(2.0 * std::numbers::pi * s2, -0.25);
  const double xi = x - x0 - 2.0 * k0 * t;
  return pref * std::sqrt(s2 / q) *
         std::exp(-xi * xi / (4.0 * q) + cplx(0.0, k0 * (x - x0) - k0 * k0 * t));
}

}  // namespace cscat
