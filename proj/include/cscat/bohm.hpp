#pragma once

// Bohmian trajectories of the full packet, the critical starting point that
// separates transmitted from reflected particles, and the equal-transmission
// shape pair.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cscat/error.hpp"
#include "cscat/potential.hpp"
#include "cscat/wavepacket.hpp"

namespace cscat {

enum class Fate { transmitted, reflected, undecided };
const char* to_string(Fate f) noexcept;

/// v = J / rho = 2 Im(psi^* psi') / |psi|^2 of the full packet.
class GuidanceField {
 public:
  /// `density_floor` is absolute; velocity() refuses points below it.
  GuidanceField(const PacketCache& cache, double density_floor);

  double velocity(double x, double t) const;
  double density(double x, double t) const;
  double floor() const noexcept { return floor_; }
  const PacketCache& cache() const noexcept { return cache_; }

 private:
  const PacketCache& cache_;
  double floor_;
};

/// Relative node floor: rho < kNodeFloor * peak counts as a node.
inline constexpr double kNodeFloor = 1e-12;
inline constexpr int kMaxHalvings = 60;

struct TrajectoryControls {
  double sample_dt = 0.5;  // output grid; shared by every trajectory
  double rtol = 1e-9;
  double atol = 1e-9;
  double initial_step = 0.05;
  double max_step = 2.0;
};

struct TrajectoryStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t node_halvings = 0;
  std::size_t evaluations = 0;
};

struct TrajectoryRecord {
  double x0 = 0.0;
  std::vector<double> t;
  std::vector<double> x;
  Fate fate = Fate::undecided;
  TrajectoryStats stats;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, TrajectoryRecord partial)
      : Error(ErrorKind::integration_failure, what), partial_(std::move(partial)) {}
  const TrajectoryRecord& partial() const noexcept { return partial_; }

 private:
  TrajectoryRecord partial_;
};

/// Dormand-Prince 5(4) from (t0, x0) to t_end; output sampled every
/// controls.sample_dt from t0. Fate is taken from the final position.
TrajectoryRecord integrate_trajectory(const GuidanceField& field, const PotentialSpec& spec, double x0, double t0,
                                      double t_end, const TrajectoryControls& controls = {});

struct HorizonControls {
  double margin = 2.0;        // window [a - margin, b + margin]
  double leak = 1e-4;         // allowed norm left in the window
  double scan_dt = 1.0;
  double dx = 0.05;
  double t_limit = 1000.0;
};

struct Horizon {
  double time = 0.0;
  double leak = 0.0;  // norm inside the window at `time`
};

/// First time after the packet centre reaches the barrier at which at most
/// `leak` of the norm remains in the window.
Horizon packet_horizon(const PacketCache& cache, const SpectralAmplitude& spectrum, const HorizonControls& controls = {});

/// Initial density rho(x, t0) on a uniform grid.
struct InitialDensity {
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> cumulative;  // trapezoid, normalized to end at 1
  double peak = 0.0;
  double total = 0.0;  // before normalization
};

InitialDensity initial_density(const PacketCache& cache, double t0, const XDomain& domain);

/// x at which the cumulative density equals q.
double density_quantile(const InitialDensity& d, double q);

/// Starting points at equal-probability quantiles (i + 1/2) / n.
std::vector<double> quantile_starts(const InitialDensity& d, std::size_t n);

struct BohmSetup {
  double t0 = 0.0;
  double horizon = 0.0;
  double extend_factor = 3.0;  // undecided paths continue to extend_factor * horizon
  TrajectoryControls controls;
};

/// Integrates to the horizon, extends undecided paths, and finally assigns a
/// still-undecided path by its side of x_c.
TrajectoryRecord classify_start(const GuidanceField& field, const PotentialSpec& spec, double x0,
                                const BohmSetup& setup);

struct CriticalPoint {
  double x_star = 0.0;
  double tol_x = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t iterations = 0;
  double mass_right = 0.0;        // int_{x*}^inf rho(x, t0) dx
  double packet_T = 0.0;          // <psi_tr | psi_tr>
  double residual = 0.0;          // |mass_right - packet_T|
  double tolerance = 0.0;         // combined tolerance
  double density_at_x_star = 0.0;
  double horizon_leak = 0.0;
  double quadrature_error = 0.0;
};

/// Bisection on x0 until the bracket is narrower than tol_x.
CriticalPoint find_critical_point(const GuidanceField& field, const PotentialSpec& spec, const BohmSetup& setup,
                                  double lo, double hi, double tol_x);

/// int_{x}^{x_max} rho(x', t0) dx' and an error estimate from halving dx.
struct TailMass {
  double value = 0.0;
  double error = 0.0;
};
TailMass tail_mass(const PacketCache& cache, double x, double t0, const XDomain& domain);

/// Fills the quantile-identity fields of `cp`.
void check_quantile_identity(CriticalPoint& cp, const PacketCache& cache, double t0, double horizon_leak,
                             const XDomain& domain);

struct CrossingAudit {
  bool ok = true;
  std::size_t pairs_checked = 0;
  double min_gap = 0.0;  // smallest x_{i+1}(t) - x_i(t) seen
};

/// Paths ordered by x0 must stay ordered at every shared sample time.
CrossingAudit audit_no_crossing(std::span<const TrajectoryRecord> paths);

/// Height h in [h_lo, h_hi] with T(family(h), E0) = target_T.
double match_height(const std::function<PotentialSpec(double)>& family, double target_T, double E0, double h_lo,
                    double h_hi);

/// Symmetric double barrier half = [(0.25, h), (0.75, 0)] starting at a.
PotentialSpec double_barrier(double h, double a = 0.0);

}  // namespace cscat
