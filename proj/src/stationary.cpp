#include "cscat/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cscat/error.hpp"

namespace cscat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx kI{0.0, 1.0};

void check_energy(double energy) {
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw Error(ErrorKind::unsupported_energy, "energy must be positive and finite");
  }
}

PlaneWavePair to_plane_waves(double kappa, double x_ref, cplx value, cplx slope) {
  const cplx d = slope / (kI * kappa);
  return {0.5 * (value + d) * std::polar(1.0, -kappa * x_ref), 0.5 * (value - d) * std::polar(1.0, kappa * x_ref)};
}

bool right_of_midpoint(const Region& r, double xc) { return r.x_lo >= xc; }

}  // namespace

std::pair<cplx, cplx> propagate(double kappa2, double s, cplx value, cplx slope) noexcept {
  if (kappa2 > 0.0) {
    const double kappa = std::sqrt(kappa2);
    const double c = std::cos(kappa * s);
    const double sn = std::sin(kappa * s);
    return {c * value + (sn / kappa) * slope, -kappa * sn * value + c * slope};
  }
  if (kappa2 < 0.0) {
    const double q = std::sqrt(-kappa2);
    const double c = std::cosh(q * s);
    const double sh = std::sinh(q * s);
    return {c * value + (sh / q) * slope, q * sh * value + c * slope};
  }
  return {value + s * slope, slope};
}

StationaryState::StationaryState(double energy, std::vector<Region> regions)
    : energy_(energy), k_(std::sqrt(energy)), regions_(std::move(regions)) {}

std::size_t StationaryState::find_region(double x, Side side) const {
  // Regions are sorted and share endpoints; the last one extends to +inf.
  auto cmp_hi = [](const Region& r, double v) { return r.x_hi < v; };
  auto it = side == Side::left
                ? std::lower_bound(regions_.begin(), regions_.end(), x, cmp_hi)
                : std::upper_bound(regions_.begin(), regions_.end(), x,
                                   [](double v, const Region& r) { return v < r.x_hi; });
  if (it == regions_.end()) {
    --it;
  }
  return static_cast<std::size_t>(std::distance(regions_.begin(), it));
}

cplx StationaryState::evaluate(double x, Side side) const {
  const auto& r = regions_[find_region(x, side)];
  return propagate(r.kappa2, x - r.x_ref, r.value, r.slope).first;
}

cplx StationaryState::derivative(double x, Side side) const {
  const auto& r = regions_[find_region(x, side)];
  return propagate(r.kappa2, x - r.x_ref, r.value, r.slope).second;
}

double StationaryState::current(double x, Side side) const {
  const auto& r = regions_[find_region(x, side)];
  const auto [v, d] = propagate(r.kappa2, x - r.x_ref, r.value, r.slope);
  return 2.0 * std::imag(std::conj(v) * d);
}

PlaneWavePair StationaryState::left_asymptote() const {
  const auto& r = regions_.front();
  return to_plane_waves(k_, r.x_ref, r.value, r.slope);
}

PlaneWavePair StationaryState::right_asymptote() const {
  const auto& r = regions_.back();
  return to_plane_waves(k_, r.x_ref, r.value, r.slope);
}

PlaneWavePair StationaryState::local_coefficients(std::size_t region) const {
  const auto& r = regions_.at(region);
  if (r.kappa2 == 0.0) {
    throw Error(ErrorKind::unsupported_energy, "threshold region has no plane-wave coefficients");
  }
  // kappa may be imaginary: e^{i kappa s} with kappa = i q is e^{-q s}.
  const cplx kappa = std::sqrt(cplx(r.kappa2, 0.0));
  const cplx d = r.slope / (kI * kappa);
  return {0.5 * (r.value + d), 0.5 * (r.value - d)};
}

StationaryState StationaryState::combine(const StationaryState& lhs, cplx ca, const StationaryState& rhs, cplx cb) {
  if (lhs.regions_.size() != rhs.regions_.size() || lhs.energy_ != rhs.energy_) {
    throw Error(ErrorKind::invalid_geometry, "cannot combine states on different partitions");
  }
  auto regions = lhs.regions_;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    regions[i].value = ca * lhs.regions_[i].value + cb * rhs.regions_[i].value;
    regions[i].slope = ca * lhs.regions_[i].slope + cb * rhs.regions_[i].slope;
  }
  return StationaryState(lhs.energy_, std::move(regions));
}

std::vector<Region> partition(const PotentialSpec& spec, double energy) {
  check_energy(energy);
  const auto& edges = spec.edges();
  const auto& segs = spec.segments();
  const double xc = spec.midpoint();

  std::vector<Region> regions;
  regions.reserve(segs.size() + 3);
  regions.push_back(Region{-kInf, edges.front(), energy, edges.front()});

  double total_opacity = 0.0;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const double kappa2 = energy - segs[j].height;
    if (kappa2 < 0.0) {
      const double opacity = std::sqrt(-kappa2) * segs[j].width;
      total_opacity += opacity;
      if (opacity > kOpacityLimit || total_opacity > kTotalOpacityLimit) {
        throw Error(ErrorKind::opacity_overflow,
                    "evanescent exponent too large for double precision; use log-scaled computation");
      }
    }
    const double lo = edges[j];
    const double hi = edges[j + 1];
    if (lo < xc && xc < hi) {
      regions.push_back(Region{lo, xc, kappa2, xc});
      regions.push_back(Region{xc, hi, kappa2, xc});
    } else {
      regions.push_back(Region{lo, hi, kappa2, hi <= xc ? hi : lo});
    }
  }
  regions.push_back(Region{edges.back(), kInf, energy, edges.back()});
  return regions;
}

Mat2 transfer_matrix(const PotentialSpec& spec, double energy) {
  const auto regions = partition(spec, energy);
  // (psi, psi') map from a to b.
  cplx m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  for (std::size_t i = 1; i + 1 < regions.size(); ++i) {
    const auto& r = regions[i];
    const double w = r.x_hi - r.x_lo;
    const auto [c0, d0] = propagate(r.kappa2, w, 1.0, 0.0);
    const auto [c1, d1] = propagate(r.kappa2, w, 0.0, 1.0);
    const cplx n00 = c0 * m00 + c1 * m10;
    const cplx n01 = c0 * m01 + c1 * m11;
    const cplx n10 = d0 * m00 + d1 * m10;
    const cplx n11 = d0 * m01 + d1 * m11;
    m00 = n00, m01 = n01, m10 = n10, m11 = n11;
  }
  const double k = std::sqrt(energy);
  const double a = spec.left_edge();
  const double b = spec.right_edge();
  // S(x) maps (c+, c-) to (psi, psi') at x.
  const cplx ea = std::polar(1.0, k * a);
  const cplx s00 = ea, s01 = 1.0 / ea, s10 = kI * k * ea, s11 = -kI * k / ea;
  const cplx p00 = m00 * s00 + m01 * s10;
  const cplx p01 = m00 * s01 + m01 * s11;
  const cplx p10 = m10 * s00 + m11 * s10;
  const cplx p11 = m10 * s01 + m11 * s11;
  const cplx eb = std::polar(1.0, -k * b);
  const cplx i00 = 0.5 * eb, i01 = 0.5 * eb / (kI * k);
  const cplx i10 = 0.5 / eb, i11 = -0.5 / (eb * kI * k);
  return Mat2{i00 * p00 + i01 * p10, i00 * p01 + i01 * p11, i10 * p00 + i11 * p10, i10 * p01 + i11 * p11};
}

StationaryState full_state(const PotentialSpec& spec, double energy) {
  auto regions = partition(spec, energy);
  const double k = std::sqrt(energy);
  const double b = spec.right_edge();

  // Start from a unit outgoing wave on the right and walk leftwards; the
  // incident amplitude found on the left fixes t = 1/A.
  cplx value = std::polar(1.0, k * b);
  cplx slope = kI * k * value;
  regions.back().value = value;
  regions.back().slope = slope;
  for (std::size_t i = regions.size() - 2; i >= 1; --i) {
    auto& r = regions[i];
    const double w = r.x_hi - r.x_lo;
    if (r.x_ref == r.x_hi) {
      r.value = value, r.slope = slope;
      std::tie(value, slope) = propagate(r.kappa2, -w, value, slope);
    } else {
      std::tie(value, slope) = propagate(r.kappa2, -w, value, slope);
      r.value = value, r.slope = slope;
    }
  }
  regions.front().value = value;
  regions.front().slope = slope;

  StationaryState raw(energy, std::move(regions));
  const auto left = raw.left_asymptote();
  if (!std::isfinite(std::abs(left.plus)) || left.plus == 0.0) {
    throw Error(ErrorKind::opacity_overflow, "incident amplitude not representable");
  }
  return StationaryState::combine(raw, 1.0 / left.plus, raw, 0.0);
}

ScatteringAmplitudes scattering_amplitudes(const PotentialSpec& spec, double energy) {
  const auto psi = full_state(spec, energy);
  return {psi.left_asymptote().minus, psi.right_asymptote().plus};
}

namespace {

StationaryState midpoint_solution(const PotentialSpec& spec, double energy, bool mirror) {
  auto regions = partition(spec, energy);
  const double xc = spec.midpoint();
  const std::size_t n = regions.size();

  std::size_t first_right = 0;
  while (first_right < n && !right_of_midpoint(regions[first_right], xc)) {
    ++first_right;
  }

  cplx value = 0.0, slope = 1.0;
  for (std::size_t i = first_right; i < n; ++i) {
    auto& r = regions[i];
    r.value = value, r.slope = slope;
    if (i + 1 < n) {
      std::tie(value, slope) = propagate(r.kappa2, r.x_hi - r.x_lo, value, slope);
    }
  }

  if (mirror) {
    if (2 * first_right != n) {
      throw Error(ErrorKind::asymmetric_potential, "region partition is not mirror symmetric");
    }
    for (std::size_t i = 0; i < first_right; ++i) {
      const auto& m = regions[n - 1 - i];
      if (m.kappa2 != regions[i].kappa2) {
        throw Error(ErrorKind::asymmetric_potential, "segment heights are not mirror symmetric");
      }
      regions[i].value = -m.value;
      regions[i].slope = m.slope;
    }
  } else {
    value = 0.0, slope = 1.0;
    for (std::size_t i = first_right; i-- > 0;) {
      auto& r = regions[i];
      r.value = value, r.slope = slope;
      if (i > 0) {
        std::tie(value, slope) = propagate(r.kappa2, r.x_lo - r.x_hi, value, slope);
      }
    }
  }
  return StationaryState(energy, std::move(regions));
}

}  // namespace

StationaryState odd_basis_solution(const PotentialSpec& spec, double energy) {
  if (!spec.is_symmetric()) {
    throw Error(ErrorKind::asymmetric_potential, "odd basis solution needs a mirror-symmetric barrier");
  }
  return midpoint_solution(spec, energy, true);
}

StationaryState midpoint_node_solution(const PotentialSpec& spec, double energy) {
  return midpoint_solution(spec, energy, false);
}

ChannelDecomposition decompose(const PotentialSpec& spec, double energy) {
  if (!spec.is_symmetric()) {
    throw Error(ErrorKind::asymmetric_potential, "channel decomposition is defined for symmetric barriers only");
  }
  ChannelDecomposition dec;
  dec.energy = energy;
  dec.k = std::sqrt(energy);
  dec.midpoint = spec.midpoint();
  dec.full = full_state(spec, energy);
  const auto u = odd_basis_solution(spec, energy);

  dec.r = dec.full.left_asymptote().minus;
  dec.t = dec.full.right_asymptote().plus;
  dec.T = std::norm(dec.t);
  dec.R = std::norm(dec.r);
  dec.alpha = u.left_asymptote().plus;
  if (!(std::abs(dec.alpha) > 0.0) || !std::isfinite(std::abs(dec.alpha))) {
    throw Error(ErrorKind::degenerate_odd_solution, "odd solution has no asymptotic amplitude");
  }
  dec.scale = dec.r / std::conj(dec.alpha);
  dec.a_ref_in = dec.scale * dec.alpha;
  dec.a_tr_in = 1.0 - dec.a_ref_in;
  dec.ref_solution = StationaryState::combine(u, dec.scale, u, 0.0);
  dec.tr_solution = StationaryState::combine(dec.full, 1.0, u, -dec.scale);
  return dec;
}

ClippedChannels clip_channels(const ChannelDecomposition& dec) {
  auto tr = dec.tr_solution.regions();
  auto ref = dec.ref_solution.regions();
  const auto& full = dec.full.regions();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (right_of_midpoint(tr[i], dec.midpoint)) {
      tr[i].value = full[i].value;
      tr[i].slope = full[i].slope;
      ref[i].value = 0.0;
      ref[i].slope = 0.0;
    }
  }
  return {StationaryState(dec.energy, std::move(tr)), StationaryState(dec.energy, std::move(ref))};
}

double amplitude_identity_residual(const PotentialSpec& spec, double energy) {
  const auto amps = scattering_amplitudes(spec, energy);
  const cplx alpha = midpoint_node_solution(spec, energy).left_asymptote().plus;
  return std::norm(1.0 - amps.r * alpha / std::conj(alpha)) - (1.0 - std::norm(amps.r));
}

double phase_relation_residual(const PotentialSpec& spec, double energy) {
  const auto amps = scattering_amplitudes(spec, energy);
  const double k = std::sqrt(energy);
  return std::real(amps.r * std::polar(1.0, -2.0 * k * spec.midpoint()) * std::conj(amps.t));
}

}  // namespace cscat
