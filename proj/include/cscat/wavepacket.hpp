#pragma once

// Time-dependent channel packets synthesized from stationary channel states:
//   psi_chan(x, t) = (2 pi)^{-1/2} sum_n w_n A(k_n) psi_chan(x; k_n^2) e^{-i k_n^2 t}
// The superposition is exact up to the k-quadrature; no time stepping.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cscat/potential.hpp"
#include "cscat/stationary.hpp"

namespace cscat {

struct SpectralAmplitude {
  std::vector<double> k;
  std::vector<double> weights;
  std::vector<cplx> amplitude;
  std::string rule = "gauss-legendre";
  double k0 = 0.0;
  double sigma_k = 0.0;
  double cutoff = 0.0;
  double x0 = 0.0;
  double chirp = 0.0;

  /// sum_n w_n |A_n|^2
  double norm() const;
  /// Hash of nodes, weights and amplitudes; ties a PacketCache to its spectrum.
  std::uint64_t fingerprint() const;
  /// Position spread of the untruncated Gaussian, 1 / (2 sigma_k).
  double sigma_x() const noexcept { return 0.5 / sigma_k; }
};

/// Gaussian |A|^2 of width sigma_k about k0 on [k0 - cutoff sigma_k, k0 + cutoff sigma_k],
/// Gauss-Legendre nodes, normalized on the nodes, phase e^{-ik x0} so that
/// the free packet is centred at x0 at t = 0. A nonzero `chirp` multiplies A by
/// e^{i chirp (k - k0)^2}.
SpectralAmplitude gaussian_spectrum(double k0, double sigma_k, int n_k, double cutoff, double x0,
                                    double chirp = 0.0);

inline constexpr double kDefaultCutoff = 8.0;
inline constexpr int kDefaultNodes = 512;

enum class Channel { full = 0, tr = 1, ref = 2 };
const char* to_string(Channel c) noexcept;

struct WavePacketField {
  std::vector<double> x;
  std::vector<cplx> psi;
  double t = 0.0;
  Channel channel = Channel::full;

  /// Largest |psi_{i+1} - psi_i| over the grid.
  double max_jump() const;
  /// Continuity proxy: every adjacent jump is bounded by 2 dx max|psi'|.
  bool continuous(std::span<const cplx> derivative) const;
};

/// Stationary channel states on every k-node, prepared once per
/// (barrier, spectrum) pair and read-only afterwards.
class PacketCache {
 public:
  PacketCache(PotentialSpec spec, const SpectralAmplitude& spectrum);

  const PotentialSpec& potential() const noexcept { return spec_; }
  std::uint64_t spectrum_fingerprint() const noexcept { return fingerprint_; }
  std::size_t size() const noexcept { return k_.size(); }
  std::span<const double> wavenumbers() const noexcept { return k_; }

  /// Spectrally averaged sum w |A|^2 T(k) and sum w |A|^2 R(k).
  double packet_transmission() const noexcept { return packet_T_; }
  double packet_reflection() const noexcept { return packet_R_; }

  struct Sample {
    std::array<cplx, 3> value{};  // indexed by Channel
    std::array<cplx, 3> slope{};
  };

  /// All three channels at (x, t).
  Sample evaluate(double x, double t) const;
  /// All three channels on a grid at one time; outputs sized like xs.
  void evaluate(std::span<const double> xs, double t, std::span<cplx> full, std::span<cplx> tr,
                std::span<cplx> ref, std::span<cplx> full_slope = {}) const;

  /// Psi_full and d/dx Psi_full at (x, t) only; the hot path for guidance.
  std::pair<cplx, cplx> full_at(double x, double t) const;

  /// Per-node stationary data.
  const ChannelDecomposition& decomposition(std::size_t n) const { return decomps_.at(n); }

 private:
  struct Asymptote {
    // [channel][node], weight-, amplitude- and 1/sqrt(2pi)-scaled.
    std::array<std::vector<double>, 3> pr, pi, mr, mi;
  };
  struct TimeSlice;
  TimeSlice slice(double t) const;
  void interior(double x, double t, Sample& out) const;

  PotentialSpec spec_;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> k_;
  std::vector<cplx> coeff_;  // w_n A_n / sqrt(2 pi)
  std::vector<ChannelDecomposition> decomps_;
  std::vector<ClippedChannels> clipped_;
  Asymptote left_, right_;
  double packet_T_ = 0.0;
  double packet_R_ = 0.0;
};

WavePacketField synthesize(const PacketCache& cache, Channel channel, const SpectralAmplitude& spectrum,
                           std::span<const double> x, double t);

struct XDomain {
  double x_min = -250.0;
  double x_max = 250.0;
  double dx = 0.05;
};

/// Density allowed at the edges of an integration domain.
inline constexpr double kEdgeDensityLimit = 1e-8;

struct ChannelSnapshot {
  double t = 0.0;
  std::array<double, 3> norm{};  // indexed by Channel
  cplx overlap;                  // <psi_tr | psi_ref>
  double edge_density = 0.0;     // largest |psi|^2 at either domain edge
};

/// Norms of all channels and the tr/ref overlap at time t, by composite
/// Simpson on a grid that breaks at a, x_c and b.
ChannelSnapshot measure_channels(const PacketCache& cache, double t, const XDomain& domain);

double channel_norm(const PacketCache& cache, Channel channel, const SpectralAmplitude& spectrum, double t,
                    const XDomain& domain);
cplx channel_overlap(const PacketCache& cache, const SpectralAmplitude& spectrum, double t, const XDomain& domain);

/// Largest change of any norm or of the overlap between two measurements of
/// the same instant at different resolutions.
double quadrature_discrepancy(const ChannelSnapshot& coarse, const ChannelSnapshot& fine);

}  // namespace cscat
