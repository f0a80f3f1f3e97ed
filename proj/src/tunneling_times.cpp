#include "cscat/tunneling_times.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cscat/quadrature.hpp"

namespace cscat {

namespace {

const QuadratureRule& unit_rule() {
  static const QuadratureRule rule = gauss_legendre(16, -1.0, 1.0);
  return rule;
}

// int_{x1}^{x2} f(x) dx over the regions of `layout`, one Gauss-Legendre
// panel per 1/|kappa| of length.
template <class F>
double integrate_regions(const StationaryState& layout, double x1, double x2, F&& f) {
  const auto& rule = unit_rule();
  double sum = 0.0;
  for (const auto& reg : layout.regions()) {
    const double lo = std::max(reg.x_lo, x1);
    const double hi = std::min(reg.x_hi, x2);
    if (!(hi > lo)) {
      continue;
    }
    const double scale = std::sqrt(std::abs(reg.kappa2));
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) * scale)));
    const double h = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = lo + (static_cast<double>(p) + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + 0.5 * h * rule.nodes[i];
        const auto [v, d] = propagate(reg.kappa2, x - reg.x_ref, reg.value, reg.slope);
        (void)d;
        sum += 0.5 * h * rule.weights[i] * f(x, v, &reg - layout.regions().data());
      }
    }
  }
  return sum;
}

cplx incident(const ChannelDecomposition& dec, Channel c) {
  switch (c) {
    case Channel::full: return 1.0;
    case Channel::tr: return dec.a_tr_in;
    case Channel::ref: return dec.a_ref_in;
  }
  return 1.0;
}

void check_interval(const DwellInterval& in) {
  if (!(in.x2 > in.x1)) {
    throw Error(ErrorKind::invalid_geometry, "dwell interval must have x2 > x1");
  }
}

}  // namespace

double dwell_time(const ChannelDecomposition& dec, Channel channel, const DwellInterval& interval) {
  check_interval(interval);
  const double a2 = std::norm(incident(dec, channel));
  if (a2 < kEmptyChannel) {
    throw Error(ErrorKind::empty_channel, std::string("channel ") + to_string(channel) + " carries no current");
  }
  const double j_in = 2.0 * dec.k * a2;
  if (channel == Channel::full) {
    return integrate_regions(dec.full, interval.x1, interval.x2,
                             [](double, cplx v, std::size_t) { return std::norm(v); }) /
           j_in;
  }
  const auto clipped = clip_channels(dec);
  const auto& state = channel == Channel::tr ? clipped.tr : clipped.ref;
  return integrate_regions(state, interval.x1, interval.x2, [](double, cplx v, std::size_t) { return std::norm(v); }) /
         j_in;
}

double dwell_time(const PotentialSpec& spec, double energy, Channel channel, std::optional<DwellInterval> interval) {
  const auto dec = decompose(spec, energy);
  return dwell_time(dec, channel, interval.value_or(DwellInterval{spec.left_edge(), spec.right_edge()}));
}

double dwell_interference(const ChannelDecomposition& dec, const DwellInterval& interval) {
  check_interval(interval);
  const auto clipped = clip_channels(dec);
  const auto& ref_regions = clipped.ref.regions();
  const double s = integrate_regions(clipped.tr, interval.x1, interval.x2, [&](double x, cplx v, std::size_t i) {
    const auto& r = ref_regions[i];
    const cplx w = propagate(r.kappa2, x - r.x_ref, r.value, r.slope).first;
    return 2.0 * std::real(std::conj(v) * w);
  });
  return s / (2.0 * dec.k);
}

std::vector<double> default_omegas() {
  std::vector<double> w;
  for (int j = 0; j <= 4; ++j) {
    w.push_back(0.02 * std::ldexp(1.0, -j));
  }
  return w;
}

cplx junction_transmission(const PotentialSpec& spec, double energy, double g) {
  const auto regions = partition(spec, energy);
  const double k = std::sqrt(energy);
  const double xc = spec.midpoint();
  cplx value = std::polar(1.0, k * spec.right_edge());
  cplx slope = cplx(0.0, k) * value;
  for (std::size_t i = regions.size() - 2; i >= 1; --i) {
    const auto& r = regions[i];
    if (r.x_hi == xc) {
      slope -= g * value;
    }
    std::tie(value, slope) = propagate(r.kappa2, r.x_lo - r.x_hi, value, slope);
  }
  const cplx a_in = 0.5 * (value + slope / cplx(0.0, k)) * std::polar(1.0, -k * spec.left_edge());
  return 1.0 / a_in;
}

LarmorReading larmor_time(const PotentialSpec& spec, double energy, Channel channel, std::span<const double> omegas) {
  if (omegas.size() < 3) {
    throw Error(ErrorKind::extrapolation_failure, "Larmor extrapolation needs at least 3 frequencies");
  }
  const auto dec = decompose(spec, energy);
  if (channel != Channel::full && std::norm(incident(dec, channel)) < kEmptyChannel) {
    throw Error(ErrorKind::empty_channel, std::string("channel ") + to_string(channel) + " carries no current");
  }
  const cplx psi_c = dec.full.evaluate(dec.midpoint);
  const double g0 = std::real(dec.scale / psi_c);

  auto amplitude = [&](double dv) -> cplx {
    const auto shifted = spec.shifted(dv);
    switch (channel) {
      case Channel::full: return scattering_amplitudes(shifted, energy).t;
      case Channel::tr: return junction_transmission(shifted, energy, g0);
      case Channel::ref: {
        const auto d = decompose(shifted, energy);
        return d.r / d.a_ref_in;
      }
    }
    return 1.0;
  };

  LarmorReading out;
  out.omega.assign(omegas.begin(), omegas.end());
  std::vector<double> ratio, zratio;
  for (double w : omegas) {
    const cplx up = amplitude(-0.5 * w);
    const cplx down = amplitude(0.5 * w);
    const double theta = std::arg(up * std::conj(down));
    out.theta.push_back(theta);
    ratio.push_back(theta / w);
    zratio.push_back((std::log(std::abs(up)) - std::log(std::abs(down))) / w);
  }
  const auto ex = richardson_to_zero(omegas, ratio, 2);
  const auto ez = richardson_to_zero(omegas, zratio, 2);
  out.time = ex.value;
  out.residual = ex.residual;
  out.out_of_plane = ez.value;
  if (!std::isfinite(ex.value) || ex.residual > kLarmorResidualLimit * std::max(1.0, std::abs(ex.value))) {
    std::ostringstream msg;
    msg << "Larmor extrapolation did not converge (residual " << ex.residual << "); theta table:";
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      msg << " (" << omegas[i] << ", " << out.theta[i] << ")";
    }
    throw ExtrapolationError(msg.str(), out.omega, out.theta);
  }
  return out;
}

GroupDelay group_delay(const PotentialSpec& spec, double energy) {
  if (!(energy > 0.0)) {
    throw Error(ErrorKind::unsupported_energy, "group delay needs E > 0");
  }
  const double h0 = 0.01 * energy;
  std::vector<double> h, d;
  for (int j = 0; j <= 4; ++j) {
    const double hj = h0 * std::ldexp(1.0, -j);
    const cplx tp = scattering_amplitudes(spec, energy + hj).t;
    const cplx tm = scattering_amplitudes(spec, energy - hj).t;
    h.push_back(hj);
    d.push_back(std::arg(tp * std::conj(tm)) / (2.0 * hj));
  }
  const auto ex = richardson_to_zero(h, d, 2);
  if (!std::isfinite(ex.value) || ex.residual > 1e-6 * std::max(1.0, std::abs(ex.value))) {
    throw Error(ErrorKind::derivative_failure,
                "phase derivative did not converge (residual " + std::to_string(ex.residual) + ")");
  }
  return {ex.value + spec.width() / (2.0 * std::sqrt(energy)), ex.residual};
}

ChannelTimes channel_times(const PotentialSpec& spec, double energy, Channel channel, std::span<const double> omegas) {
  ChannelTimes ct;
  ct.energy = energy;
  ct.channel = channel;
  ct.dwell = dwell_time(spec, energy, channel);
  const auto l = larmor_time(spec, energy, channel, omegas);
  ct.larmor = l.time;
  ct.larmor_residual = l.residual;
  ct.larmor_out_of_plane = l.out_of_plane;
  ct.omega = l.omega;
  ct.theta = l.theta;
  return ct;
}

}  // namespace cscat
