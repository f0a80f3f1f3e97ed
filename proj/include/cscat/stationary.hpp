#pragma once

// Stationary scattering at fixed energy and the transmission/reflection
// channel decomposition of the left-incident scattering state.

#include <complex>
#include <utility>
#include <vector>

#include "cscat/potential.hpp"

namespace cscat {

using cplx = std::complex<double>;

/// Which one-sided limit to take when x sits exactly on a region boundary.
enum class Side { left, right };

/// One piece of a piecewise solution. Inside the piece the solution is
///   psi(x) = value * C(x - x_ref) + slope * S(x - x_ref)
/// with C = cos(kappa s), S = sin(kappa s)/kappa and kappa^2 = E - V; the
/// same expressions continue to cosh/sinh for kappa^2 < 0 and to {1, s} at
/// kappa^2 = 0. x_ref is the region endpoint closest to the barrier midpoint.
struct Region {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double kappa2 = 0.0;
  double x_ref = 0.0;
  cplx value{};
  cplx slope{};
};

/// Coefficients of e^{+i kappa x} and e^{-i kappa x}.
struct PlaneWavePair {
  cplx plus{};
  cplx minus{};
};

/// A stationary solution sampled as regions: left asymptote, barrier pieces
/// (the piece containing x_c is split there), right asymptote.
class StationaryState {
 public:
  StationaryState() = default;
  StationaryState(double energy, std::vector<Region> regions);

  double energy() const noexcept { return energy_; }
  double wavenumber() const noexcept { return k_; }
  const std::vector<Region>& regions() const noexcept { return regions_; }

  cplx evaluate(double x, Side side = Side::left) const;
  cplx derivative(double x, Side side = Side::left) const;
  /// Probability current J = 2 Im(psi* psi').
  double current(double x, Side side = Side::left) const;

  /// Asymptotic coefficients in global x: psi = plus e^{ikx} + minus e^{-ikx}.
  PlaneWavePair left_asymptote() const;
  PlaneWavePair right_asymptote() const;

  /// Local coefficients of an interior region with kappa^2 != 0, relative to
  /// its x_ref: psi = plus e^{i kappa (x - x_ref)} + minus e^{-i kappa (x - x_ref)}.
  PlaneWavePair local_coefficients(std::size_t region) const;

  /// Region-wise lhs*ca + rhs*cb; both states must share one partition.
  static StationaryState combine(const StationaryState& lhs, cplx ca, const StationaryState& rhs, cplx cb);

  std::size_t find_region(double x, Side side) const;

 private:
  double energy_ = 0.0;
  double k_ = 0.0;
  std::vector<Region> regions_;
};

/// (psi, psi') carried across a distance s in a region with the given kappa^2.
std::pair<cplx, cplx> propagate(double kappa2, double s, cplx value, cplx slope) noexcept;

/// Region skeleton (values zeroed) for `spec` at energy E. Validates E and the
/// opacity guard.
std::vector<Region> partition(const PotentialSpec& spec, double energy);

/// Per-segment opacity limit kappa_j w_j; larger values raise opacity_overflow.
inline constexpr double kOpacityLimit = 300.0;
/// Limit on the summed evanescent exponent across the whole barrier.
inline constexpr double kTotalOpacityLimit = 650.0;

struct Mat2 {
  cplx m00, m01, m10, m11;
  cplx det() const noexcept { return m00 * m11 - m01 * m10; }
};

/// Maps left-asymptote (c_plus, c_minus) to right-asymptote (c_plus, c_minus)
/// in global coordinates.
Mat2 transfer_matrix(const PotentialSpec& spec, double energy);

struct ScatteringAmplitudes {
  cplx r;
  cplx t;
};

ScatteringAmplitudes scattering_amplitudes(const PotentialSpec& spec, double energy);

/// Left-incident scattering state: e^{ikx} + r e^{-ikx} on the left, t e^{ikx}
/// on the right.
StationaryState full_state(const PotentialSpec& spec, double energy);

/// Real solution with u(x_c) = 0, u'(x_c) = 1. The left half is the exact
/// mirror image of the right half, so u is odd about x_c.
StationaryState odd_basis_solution(const PotentialSpec& spec, double energy);

/// Same initial data at x_c but integrated independently to both sides; this
/// is defined for asymmetric barriers too (no oddness then).
StationaryState midpoint_node_solution(const PotentialSpec& spec, double energy);

struct ChannelDecomposition {
  double energy = 0.0;
  double k = 0.0;
  double midpoint = 0.0;
  cplx r, t;
  double T = 0.0;
  double R = 0.0;
  cplx alpha;     // e^{ikx} coefficient of u on the left
  cplx scale;     // C = r / conj(alpha)
  cplx a_tr_in;   // 1 - C alpha
  cplx a_ref_in;  // C alpha
  StationaryState full;
  StationaryState tr_solution;
  StationaryState ref_solution;
};

/// Psi_full = Psi_tr + Psi_ref with Psi_ref = C u, C chosen so that Psi_ref's
/// outgoing wave on the left is exactly r. Refuses asymmetric barriers.
ChannelDecomposition decompose(const PotentialSpec& spec, double energy);

struct ClippedChannels {
  StationaryState tr;   // Psi_tr for x <= x_c, Psi_full beyond
  StationaryState ref;  // Psi_ref for x <= x_c, zero beyond
};

ClippedChannels clip_channels(const ChannelDecomposition& dec);

/// |1 - r alpha / conj(alpha)|^2 - (1 - |r|^2), with alpha from the midpoint
/// node solution. Vanishes for symmetric barriers.
double amplitude_identity_residual(const PotentialSpec& spec, double energy);

/// Re(r e^{-2ik x_c} t*): zero for symmetric barriers.
double phase_relation_residual(const PotentialSpec& spec, double energy);

}  // namespace cscat
