#pragma once

// Independent time-stepping oracle: Crank-Nicolson in time with the
// fourth-order Numerov (Mehrstellen) operator in space on a uniform grid with
// Dirichlet walls.
//
//   M = tridiag(1, 10, 1) / 12,  K = -delta^2 / dx^2 + (M V + V M) / 2
//   (M + i dt/2 K) psi^{n+1} = (M - i dt/2 K) psi^n
//
// K and M are real symmetric, so the scheme conserves dx psi^dagger M psi
// exactly (up to rounding).

#include <complex>
#include <span>
#include <vector>

#include "cscat/potential.hpp"
#include "cscat/wavepacket.hpp"

namespace cscat {

struct GridBudget {
  double max_k_dx = 0.2;       // k_max dx
  double max_omega_dt = 0.01;  // (largest energy scale) dt
};

class GridEvolver {
 public:
  /// Grid x_i = x_min + i dx, i = 0..n-1; k_max is the largest wavenumber the
  /// state carries and sets the accuracy budget.
  GridEvolver(const PotentialSpec& spec, double x_min, double dx, std::size_t n, double dt, double k_max,
              GridBudget budget = {});

  std::span<const double> x() const noexcept { return x_; }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }

  void step(std::vector<cplx>& psi) const;
  void advance(std::vector<cplx>& psi, std::size_t steps) const;

  /// dx psi^dagger M psi
  double norm(std::span<const cplx> psi) const;

 private:
  double dx_, dt_;
  std::vector<double> x_;
  std::vector<double> v_;
  // Interior tridiagonal rows of K: diagonal and coupling to the next node.
  std::vector<double> k_diag_, k_off_;
  // Forward-eliminated factors of M + i tau K.
  std::vector<cplx> lu_diag_inv_, lu_upper_;
  mutable std::vector<cplx> rhs_;
};

/// Evolves `initial` (uniform grid) by `steps` steps of dt.
WavePacketField grid_evolve_oracle(const WavePacketField& initial, const PotentialSpec& spec, double dt,
                                   std::size_t steps, double k_max, GridBudget budget = {});

/// sqrt(sum dx |a - b|^2) on a uniform grid.
double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx);

/// Free Gaussian packet with position spread sigma_x, mean wavenumber k0,
/// centred at x0 at t = 0 (units E = k^2).
cplx free_gaussian(double x, double t, double k0, double sigma_x, double x0);

}  // namespace cscat
