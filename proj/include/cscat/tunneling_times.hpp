#pragma once

// Dwell, Larmor-clock and phase (group-delay) times per channel.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cscat/error.hpp"
#include "cscat/potential.hpp"
#include "cscat/stationary.hpp"
#include "cscat/wavepacket.hpp"

namespace cscat {

/// Channel amplitudes below this |A_in|^2 are treated as empty.
inline constexpr double kEmptyChannel = 1e-24;

/// Integration interval for dwell times; defaults to the barrier [a, b].
struct DwellInterval {
  double x1;
  double x2;
};

/// tau = (1 / J_in) int_{x1}^{x2} |psi_chan|^2 dx with J_in = 2k |A_chan,in|^2
/// (A = 1 for the full state).
double dwell_time(const ChannelDecomposition& dec, Channel channel, const DwellInterval& interval);
double dwell_time(const PotentialSpec& spec, double energy, Channel channel,
                  std::optional<DwellInterval> interval = std::nullopt);

/// (1/2k) int_{x1}^{x2} 2 Re(psi_tr^* psi_ref) dx: the interference term that
/// closes tau_full = T tau_tr + R tau_ref + I.
double dwell_interference(const ChannelDecomposition& dec, const DwellInterval& interval);

/// Default Larmor frequency ladder: 0.02 * 2^{-j}, j = 0..4 (a factor 16).
std::vector<double> default_omegas();

class ExtrapolationError : public Error {
 public:
  ExtrapolationError(const std::string& what, std::vector<double> omega, std::vector<double> theta)
      : Error(ErrorKind::extrapolation_failure, what), omega_(std::move(omega)), theta_(std::move(theta)) {}
  const std::vector<double>& omega() const noexcept { return omega_; }
  const std::vector<double>& theta() const noexcept { return theta_; }

 private:
  std::vector<double> omega_, theta_;
};

struct LarmorReading {
  double time = 0.0;          // lim theta / omega (in-plane)
  double residual = 0.0;      // Richardson residual
  double out_of_plane = 0.0;  // lim (ln|A_up| - ln|A_down|) / omega, reported only
  std::vector<double> omega;
  std::vector<double> theta;
};

/// Relative residual above which the Larmor extrapolation is rejected.
inline constexpr double kLarmorResidualLimit = 1e-6;

/// Spin-up sees V - omega/2 inside the barrier, spin-down V + omega/2;
/// theta(omega) = arg A_up - arg A_down with
///   tr : transmission amplitude of the barrier plus the frozen midpoint
///        junction that makes psi_tr a scattering state,
///   ref: r / A_ref_in of each spin branch's own decomposition.
LarmorReading larmor_time(const PotentialSpec& spec, double energy, Channel channel,
                          std::span<const double> omegas);

/// Transmission amplitude of `spec` with a derivative jump psi'(x_c+) -
/// psi'(x_c-) = g psi(x_c) at the midpoint.
cplx junction_transmission(const PotentialSpec& spec, double energy, double g);

struct GroupDelay {
  double time = 0.0;
  double residual = 0.0;
};

/// d arg t / dE + (b - a) / (2k): phase time over the barrier region.
GroupDelay group_delay(const PotentialSpec& spec, double energy);

struct ChannelTimes {
  double energy = 0.0;
  Channel channel = Channel::full;
  double dwell = 0.0;
  double larmor = 0.0;
  double larmor_residual = 0.0;
  double larmor_out_of_plane = 0.0;
  std::vector<double> omega;
  std::vector<double> theta;
};

ChannelTimes channel_times(const PotentialSpec& spec, double energy, Channel channel,
                           std::span<const double> omegas);

}  // namespace cscat
