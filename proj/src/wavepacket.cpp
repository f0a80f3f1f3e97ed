#include "cscat/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "cscat/error.hpp"
#include "cscat/kernels.hpp"
#include "cscat/parallel.hpp"
#include "cscat/quadrature.hpp"

namespace cscat {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::size_t idx(Channel c) { return static_cast<std::size_t>(c); }

}  // namespace

const char* to_string(Channel c) noexcept {
  switch (c) {
    case Channel::full: return "full";
    case Channel::tr: return "tr";
    case Channel::ref: return "ref";
  }
  return "?";
}

double SpectralAmplitude::norm() const {
  double s = 0.0;
  for (std::size_t n = 0; n < k.size(); ++n) {
    s += weights[n] * std::norm(amplitude[n]);
  }
  return s;
}

std::uint64_t SpectralAmplitude::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  h = fnv1a(h, k.data(), k.size() * sizeof(double));
  h = fnv1a(h, weights.data(), weights.size() * sizeof(double));
  h = fnv1a(h, amplitude.data(), amplitude.size() * sizeof(cplx));
  return h;
}

SpectralAmplitude gaussian_spectrum(double k0, double sigma_k, int n_k, double cutoff, double x0, double chirp) {
  if (!(sigma_k > 0.0) || !(cutoff > 0.0)) {
    throw Error(ErrorKind::spectrum_domain, "sigma_k and cutoff must be positive");
  }
  const double k_min = k0 - cutoff * sigma_k;
  if (!(k_min > 0.0)) {
    throw Error(ErrorKind::spectrum_domain, "spectrum support reaches k <= 0 (negative-k leakage)");
  }
  if (n_k < 64) {
    throw Error(ErrorKind::spectrum_domain, "at least 64 k-nodes are required");
  }
  auto rule = gauss_legendre(n_k, k_min, k0 + cutoff * sigma_k);
  SpectralAmplitude s;
  s.k = std::move(rule.nodes);
  s.weights = std::move(rule.weights);
  s.k0 = k0;
  s.sigma_k = sigma_k;
  s.cutoff = cutoff;
  s.x0 = x0;
  s.chirp = chirp;
  s.amplitude.resize(s.k.size());
  for (std::size_t n = 0; n < s.k.size(); ++n) {
    const double dk = s.k[n] - k0;
    const double mag = std::exp(-dk * dk / (4.0 * sigma_k * sigma_k));
    s.amplitude[n] = mag * std::polar(1.0, -s.k[n] * x0 + chirp * dk * dk);
  }
  const double scale = 1.0 / std::sqrt(s.norm());
  for (auto& a : s.amplitude) {
    a *= scale;
  }
  return s;
}

double WavePacketField::max_jump() const {
  double m = 0.0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    m = std::max(m, std::abs(psi[i] - psi[i - 1]));
  }
  return m;
}

bool WavePacketField::continuous(std::span<const cplx> derivative) const {
  double dmax = 0.0;
  for (const auto& d : derivative) {
    dmax = std::max(dmax, std::abs(d));
  }
  for (std::size_t i = 1; i < psi.size(); ++i) {
    const double dx = x[i] - x[i - 1];
    if (std::abs(psi[i] - psi[i - 1]) > 2.0 * dx * dmax + 1e-14) {
      return false;
    }
  }
  return true;
}

struct PacketCache::TimeSlice {
  Asymptote left, right;
};

PacketCache::PacketCache(PotentialSpec spec, const SpectralAmplitude& spectrum)
    : spec_(std::move(spec)), fingerprint_(spectrum.fingerprint()), k_(spectrum.k) {
  const std::size_t n = k_.size();
  decomps_.resize(n);
  clipped_.resize(n);
  parallel_for(n, [&](std::size_t j) {
    decomps_[j] = decompose(spec_, k_[j] * k_[j]);
    clipped_[j] = clip_channels(decomps_[j]);
  });

  coeff_.resize(n);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (auto* side : {&left_, &right_}) {
    for (std::size_t c = 0; c < 3; ++c) {
      side->pr[c].assign(n, 0.0);
      side->pi[c].assign(n, 0.0);
      side->mr[c].assign(n, 0.0);
      side->mi[c].assign(n, 0.0);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    coeff_[j] = spectrum.weights[j] * spectrum.amplitude[j] * inv_sqrt_2pi;
    const double w2 = spectrum.weights[j] * std::norm(spectrum.amplitude[j]);
    packet_T_ += w2 * decomps_[j].T;
    packet_R_ += w2 * decomps_[j].R;

    const std::array<const StationaryState*, 3> states{&decomps_[j].full, &clipped_[j].tr, &clipped_[j].ref};
    for (std::size_t c = 0; c < 3; ++c) {
      const auto l = states[c]->left_asymptote();
      const auto r = states[c]->right_asymptote();
      const cplx lp = coeff_[j] * l.plus, lm = coeff_[j] * l.minus;
      const cplx rp = coeff_[j] * r.plus, rm = coeff_[j] * r.minus;
      left_.pr[c][j] = lp.real(), left_.pi[c][j] = lp.imag();
      left_.mr[c][j] = lm.real(), left_.mi[c][j] = lm.imag();
      right_.pr[c][j] = rp.real(), right_.pi[c][j] = rp.imag();
      right_.mr[c][j] = rm.real(), right_.mi[c][j] = rm.imag();
    }
  }
}

PacketCache::TimeSlice PacketCache::slice(double t) const {
  TimeSlice s{left_, right_};
  const std::size_t n = k_.size();
  for (std::size_t j = 0; j < n; ++j) {
    const cplx ph = std::polar(1.0, -k_[j] * k_[j] * t);
    for (auto* side : {&s.left, &s.right}) {
      for (std::size_t c = 0; c < 3; ++c) {
        const cplx p = cplx(side->pr[c][j], side->pi[c][j]) * ph;
        const cplx m = cplx(side->mr[c][j], side->mi[c][j]) * ph;
        side->pr[c][j] = p.real(), side->pi[c][j] = p.imag();
        side->mr[c][j] = m.real(), side->mi[c][j] = m.imag();
      }
    }
  }
  return s;
}

void PacketCache::interior(double x, double t, Sample& out) const {
  out = Sample{};
  for (std::size_t j = 0; j < k_.size(); ++j) {
    const cplx c = coeff_[j] * std::polar(1.0, -k_[j] * k_[j] * t);
    const std::array<const StationaryState*, 3> states{&decomps_[j].full, &clipped_[j].tr, &clipped_[j].ref};
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const auto& reg = states[ch]->regions()[states[ch]->find_region(x, Side::left)];
      const auto [v, d] = propagate(reg.kappa2, x - reg.x_ref, reg.value, reg.slope);
      out.value[ch] += c * v;
      out.slope[ch] += c * d;
    }
  }
}

std::pair<cplx, cplx> PacketCache::full_at(double x, double t) const {
  cplx value = 0.0, slope = 0.0;
  const std::size_t n = k_.size();
  if (x > spec_.left_edge() && x <= spec_.right_edge()) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx c = coeff_[j] * std::polar(1.0, -k_[j] * k_[j] * t);
      const auto& st = decomps_[j].full;
      const auto& reg = st.regions()[st.find_region(x, Side::left)];
      const auto [v, d] = propagate(reg.kappa2, x - reg.x_ref, reg.value, reg.slope);
      value += c * v;
      slope += c * d;
    }
    return {value, slope};
  }
  const auto& side = x <= spec_.left_edge() ? left_ : right_;
  for (std::size_t j = 0; j < n; ++j) {
    const double k = k_[j];
    const cplx ep = std::polar(1.0, k * x - k * k * t);
    const cplx em = std::polar(1.0, -k * x - k * k * t);
    const cplx p = cplx(side.pr[0][j], side.pi[0][j]) * ep;
    const cplx m = cplx(side.mr[0][j], side.mi[0][j]) * em;
    value += p + m;
    slope += cplx(0.0, k) * (p - m);
  }
  return {value, slope};
}

namespace {

std::array<kernels::PlaneWaveSet, 3> sets_of(const std::array<std::vector<double>, 3>& pr,
                                             const std::array<std::vector<double>, 3>& pi,
                                             const std::array<std::vector<double>, 3>& mr,
                                             const std::array<std::vector<double>, 3>& mi) {
  std::array<kernels::PlaneWaveSet, 3> sets{};
  for (std::size_t c = 0; c < 3; ++c) {
    sets[c] = {pr[c].data(), pi[c].data(), mr[c].data(), mi[c].data()};
  }
  return sets;
}

}  // namespace

PacketCache::Sample PacketCache::evaluate(double x, double t) const {
  Sample out;
  if (x > spec_.left_edge() && x <= spec_.right_edge()) {
    interior(x, t, out);
    return out;
  }
  const auto s = slice(t);
  const auto& side = x <= spec_.left_edge() ? s.left : s.right;
  const auto sets = sets_of(side.pr, side.pi, side.mr, side.mi);
  kernels::plane_wave_sum(k_, sets, x, out.value, out.slope);
  return out;
}

void PacketCache::evaluate(std::span<const double> xs, double t, std::span<cplx> full, std::span<cplx> tr,
                           std::span<cplx> ref, std::span<cplx> full_slope) const {
  const auto s = slice(t);
  const auto left_sets = sets_of(s.left.pr, s.left.pi, s.left.mr, s.left.mi);
  const auto right_sets = sets_of(s.right.pr, s.right.pi, s.right.mr, s.right.mi);
  const double a = spec_.left_edge();
  const double b = spec_.right_edge();
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    Sample out;
    if (x <= a) {
      kernels::plane_wave_sum(k_, left_sets, x, out.value, out.slope);
    } else if (x > b) {
      // Right of the barrier psi_tr is Psi_full and psi_ref vanishes.
      kernels::plane_wave_sum(k_, std::span(right_sets).first(1), x, std::span(out.value).first(1),
                              std::span(out.slope).first(1));
      out.value[1] = out.value[0];
      out.slope[1] = out.slope[0];
    } else {
      interior(x, t, out);
    }
    full[i] = out.value[0];
    tr[i] = out.value[1];
    ref[i] = out.value[2];
    if (!full_slope.empty()) {
      full_slope[i] = out.slope[0];
    }
  });
}

WavePacketField synthesize(const PacketCache& cache, Channel channel, const SpectralAmplitude& spectrum,
                           std::span<const double> x, double t) {
  if (cache.spectrum_fingerprint() != spectrum.fingerprint()) {
    throw Error(ErrorKind::stale_cache, "packet cache was built for a different spectrum");
  }
  std::vector<cplx> full(x.size()), tr(x.size()), ref(x.size());
  cache.evaluate(x, t, full, tr, ref);
  WavePacketField f;
  f.x.assign(x.begin(), x.end());
  f.t = t;
  f.channel = channel;
  switch (channel) {
    case Channel::full: f.psi = std::move(full); break;
    case Channel::tr: f.psi = std::move(tr); break;
    case Channel::ref: f.psi = std::move(ref); break;
  }
  return f;
}

ChannelSnapshot measure_channels(const PacketCache& cache, double t, const XDomain& domain) {
  const auto& spec = cache.potential();
  const double xc = spec.midpoint();
  if (!(domain.x_min < spec.left_edge()) || !(domain.x_max > spec.right_edge())) {
    throw Error(ErrorKind::domain_too_small, "x-domain must enclose the barrier");
  }
  const std::array<double, 1> left_break{spec.left_edge()};
  const std::array<double, 1> right_break{spec.right_edge()};
  const auto left = simpson_grid(domain.x_min, xc, domain.dx, left_break);
  const auto right = simpson_grid(xc, domain.x_max, domain.dx, right_break);

  ChannelSnapshot snap;
  snap.t = t;
  for (const auto* rule : {&left, &right}) {
    const auto n = rule->nodes.size();
    std::vector<cplx> full(n), tr(n), ref(n);
    cache.evaluate(rule->nodes, t, full, tr, ref);
    snap.norm[idx(Channel::full)] += kernels::weighted_norm(rule->weights, full);
    snap.norm[idx(Channel::tr)] += kernels::weighted_norm(rule->weights, tr);
    snap.norm[idx(Channel::ref)] += kernels::weighted_norm(rule->weights, ref);
    if (rule == &left) {
      snap.overlap = kernels::weighted_inner(rule->weights, tr, ref);
      snap.edge_density = std::max({std::norm(full.front()), std::norm(tr.front()), std::norm(ref.front())});
    } else {
      snap.edge_density =
          std::max({snap.edge_density, std::norm(full.back()), std::norm(tr.back()), std::norm(ref.back())});
    }
  }
  if (snap.edge_density > kEdgeDensityLimit) {
    throw Error(ErrorKind::domain_too_small,
                "packet density at the x-domain edge is " + std::to_string(snap.edge_density));
  }
  return snap;
}

double channel_norm(const PacketCache& cache, Channel channel, const SpectralAmplitude& spectrum, double t,
                    const XDomain& domain) {
  if (cache.spectrum_fingerprint() != spectrum.fingerprint()) {
    throw Error(ErrorKind::stale_cache, "packet cache was built for a different spectrum");
  }
  return measure_channels(cache, t, domain).norm[idx(channel)];
}

cplx channel_overlap(const PacketCache& cache, const SpectralAmplitude& spectrum, double t, const XDomain& domain) {
  if (cache.spectrum_fingerprint() != spectrum.fingerprint()) {
    throw Error(ErrorKind::stale_cache, "packet cache was built for a different spectrum");
  }
  return measure_channels(cache, t, domain).overlap;
}

double quadrature_discrepancy(const ChannelSnapshot& coarse, const ChannelSnapshot& fine) {
  double d = std::abs(coarse.overlap - fine.overlap);
  for (std::size_t c = 0; c < 3; ++c) {
    d = std::max(d, std::abs(coarse.norm[c] - fine.norm[c]));
  }
  return d;
}

}  // namespace cscat
