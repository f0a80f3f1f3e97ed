#include "cscat/bohm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/toms748_solve.hpp>

#include "cscat/quadrature.hpp"

namespace cscat {

const char* to_string(Fate f) noexcept {
  switch (f) {
    case Fate::transmitted: return "transmitted";
    case Fate::reflected: return "reflected";
    case Fate::undecided: return "undecided";
  }
  return "?";
}

GuidanceField::GuidanceField(const PacketCache& cache, double density_floor)
    : cache_(cache), floor_(density_floor) {}

double GuidanceField::density(double x, double t) const { return std::norm(cache_.full_at(x, t).first); }

double GuidanceField::velocity(double x, double t) const {
  const auto [psi, dpsi] = cache_.full_at(x, t);
  const double rho = std::norm(psi);
  if (!(rho >= floor_)) {
    throw Error(ErrorKind::node_proximity, "density " + std::to_string(rho) + " below node floor");
  }
  return 2.0 * std::imag(std::conj(psi) * dpsi) / rho;
}

namespace {

Fate fate_of(const PotentialSpec& spec, double x) {
  if (x > spec.right_edge()) {
    return Fate::transmitted;
  }
  if (x < spec.left_edge()) {
    return Fate::reflected;
  }
  return Fate::undecided;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                 e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

TrajectoryRecord integrate_trajectory(const GuidanceField& field, const PotentialSpec& spec, double x0, double t0,
                                      double t_end, const TrajectoryControls& ctl) {
  TrajectoryRecord rec;
  rec.x0 = x0;
  rec.t.push_back(t0);
  rec.x.push_back(x0);

  auto f = [&](double t, double x) {
    ++rec.stats.evaluations;
    return field.velocity(x, t);
  };

  double t = t0, x = x0, h = ctl.initial_step;
  double k1;
  try {
    k1 = f(t, x);
  } catch (const Error& e) {
    throw IntegrationError(std::string("cannot start: ") + e.what(), rec);
  }
  std::size_t next = 1;
  int halvings = 0;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (t < t_end - eps) {
    const double target = std::min(t0 + static_cast<double>(next) * ctl.sample_dt, t_end);
    const double remaining = target - t;
    const bool hits = h >= remaining;
    const double hs = hits ? remaining : h;

    double x5, k7, err;
    try {
      const double k2 = f(t + c2 * hs, x + hs * a21 * k1);
      const double k3 = f(t + c3 * hs, x + hs * (a31 * k1 + a32 * k2));
      const double k4 = f(t + c4 * hs, x + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const double k5 = f(t + c5 * hs, x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const double k6 = f(t + hs, x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      x5 = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(t + hs, x5);
      const double x4 = x + hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = std::abs(x5 - x4);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::node_proximity) {
        throw;
      }
      ++rec.stats.node_halvings;
      if (++halvings > kMaxHalvings) {
        rec.fate = fate_of(spec, x);
        throw IntegrationError("step-size underflow near a persistent node", rec);
      }
      h = 0.5 * hs;
      continue;
    }

    const double scale = ctl.atol + ctl.rtol * std::max(std::abs(x), std::abs(x5));
    const double en = err / scale;
    if (en <= 1.0) {
      ++rec.stats.accepted;
      halvings = 0;
      t = hits ? target : t + hs;
      x = x5;
      k1 = k7;
      if (hits) {
        rec.t.push_back(t);
        rec.x.push_back(x);
        ++next;
      }
      const double grow = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(ctl.max_step, std::max(hits ? h : 0.0, hs * grow));
    } else {
      ++rec.stats.rejected;
      h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      rec.fate = fate_of(spec, x);
      throw IntegrationError("step-size underflow", rec);
    }
  }
  rec.fate = fate_of(spec, rec.x.back());
  return rec;
}

namespace {

QuadratureRule window_rule(const PotentialSpec& spec, double lo, double hi, double dx) {
  std::vector<double> breaks;
  for (double e : spec.edges()) {
    breaks.push_back(e);
  }
  breaks.push_back(spec.midpoint());
  std::sort(breaks.begin(), breaks.end());
  return simpson_grid(lo, hi, dx, breaks);
}

double window_mass(const PacketCache& cache, const QuadratureRule& rule, double t) {
  const auto n = rule.nodes.size();
  std::vector<cplx> full(n), tr(n), ref(n);
  cache.evaluate(rule.nodes, t, full, tr, ref);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += rule.weights[i] * std::norm(full[i]);
  }
  return s;
}

}  // namespace

Horizon packet_horizon(const PacketCache& cache, const SpectralAmplitude& spectrum, const HorizonControls& ctl) {
  const auto& spec = cache.potential();
  const auto rule = window_rule(spec, spec.left_edge() - ctl.margin, spec.right_edge() + ctl.margin, ctl.dx);
  double t = std::max(0.0, (spec.left_edge() - spectrum.x0) / (2.0 * spectrum.k0));
  for (; t <= ctl.t_limit; t += ctl.scan_dt) {
    const double m = window_mass(cache, rule, t);
    if (m <= ctl.leak) {
      return {t, m};
    }
  }
  throw Error(ErrorKind::integration_failure, "packet does not leave the barrier window before t_limit");
}

InitialDensity initial_density(const PacketCache& cache, double t0, const XDomain& domain) {
  InitialDensity d;
  const auto n = static_cast<std::size_t>(std::llround((domain.x_max - domain.x_min) / domain.dx)) + 1;
  d.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.x[i] = domain.x_min + static_cast<double>(i) * domain.dx;
  }
  std::vector<cplx> full(n), tr(n), ref(n);
  cache.evaluate(d.x, t0, full, tr, ref);
  d.rho.resize(n);
  d.cumulative.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d.rho[i] = std::norm(full[i]);
    d.peak = std::max(d.peak, d.rho[i]);
    if (i > 0) {
      d.cumulative[i] = d.cumulative[i - 1] + 0.5 * (d.rho[i] + d.rho[i - 1]) * (d.x[i] - d.x[i - 1]);
    }
  }
  d.total = d.cumulative.back();
  for (auto& c : d.cumulative) {
    c /= d.total;
  }
  return d;
}

double density_quantile(const InitialDensity& d, double q) {
  const auto it = std::lower_bound(d.cumulative.begin(), d.cumulative.end(), q);
  if (it == d.cumulative.begin()) {
    return d.x.front();
  }
  if (it == d.cumulative.end()) {
    return d.x.back();
  }
  const auto i = static_cast<std::size_t>(it - d.cumulative.begin());
  const double c0 = d.cumulative[i - 1], c1 = d.cumulative[i];
  const double s = c1 > c0 ? (q - c0) / (c1 - c0) : 0.0;
  return d.x[i - 1] + s * (d.x[i] - d.x[i - 1]);
}

std::vector<double> quantile_starts(const InitialDensity& d, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = density_quantile(d, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return xs;
}

TrajectoryRecord classify_start(const GuidanceField& field, const PotentialSpec& spec, double x0,
                                const BohmSetup& setup) {
  const double dt = setup.controls.sample_dt;
  const auto align = [&](double t) { return setup.t0 + std::ceil((t - setup.t0) / dt - 1e-9) * dt; };
  auto rec = integrate_trajectory(field, spec, x0, setup.t0, align(setup.horizon), setup.controls);
  if (rec.fate == Fate::undecided) {
    const auto more = integrate_trajectory(field, spec, rec.x.back(), rec.t.back(),
                                           align(setup.extend_factor * setup.horizon), setup.controls);
    rec.t.insert(rec.t.end(), more.t.begin() + 1, more.t.end());
    rec.x.insert(rec.x.end(), more.x.begin() + 1, more.x.end());
    rec.stats.accepted += more.stats.accepted;
    rec.stats.rejected += more.stats.rejected;
    rec.stats.node_halvings += more.stats.node_halvings;
    rec.stats.evaluations += more.stats.evaluations;
    rec.fate = more.fate;
  }
  if (rec.fate == Fate::undecided) {
    rec.fate = rec.x.back() > spec.midpoint() ? Fate::transmitted : Fate::reflected;
  }
  return rec;
}

CriticalPoint find_critical_point(const GuidanceField& field, const PotentialSpec& spec, const BohmSetup& setup,
                                  double lo, double hi, double tol_x) {
  if (!(hi > lo) || !(tol_x > 0.0)) {
    throw Error(ErrorKind::bracket, "bracket needs lo < hi and tol_x > 0");
  }
  CriticalPoint cp;
  cp.tol_x = tol_x;
  const Fate f_lo = classify_start(field, spec, lo, setup).fate;
  const Fate f_hi = classify_start(field, spec, hi, setup).fate;
  if (f_lo == f_hi) {
    throw Error(ErrorKind::bracket, std::string("both bracket ends are ") + to_string(f_lo));
  }
  while (hi - lo > tol_x) {
    const double mid = 0.5 * (lo + hi);
    const Fate f = classify_start(field, spec, mid, setup).fate;
    (f == f_lo ? lo : hi) = mid;
    ++cp.iterations;
  }
  cp.bracket_lo = lo;
  cp.bracket_hi = hi;
  cp.x_star = 0.5 * (lo + hi);
  return cp;
}

TailMass tail_mass(const PacketCache& cache, double x, double t0, const XDomain& domain) {
  const auto& spec = cache.potential();
  const auto coarse = window_rule(spec, x, domain.x_max, domain.dx);
  const auto fine = window_rule(spec, x, domain.x_max, 0.5 * domain.dx);
  const double mc = window_mass(cache, coarse, t0);
  const double mf = window_mass(cache, fine, t0);
  return {mf, std::abs(mf - mc)};
}

void check_quantile_identity(CriticalPoint& cp, const PacketCache& cache, double t0, double horizon_leak,
                             const XDomain& domain) {
  const auto tm = tail_mass(cache, cp.x_star, t0, domain);
  cp.mass_right = tm.value;
  cp.quadrature_error = tm.error;
  cp.packet_T = cache.packet_transmission();
  cp.residual = std::abs(cp.mass_right - cp.packet_T);
  cp.density_at_x_star = std::norm(cache.full_at(cp.x_star, t0).first);
  cp.horizon_leak = horizon_leak;
  cp.tolerance = 2.0 * cp.tol_x * cp.density_at_x_star + horizon_leak + tm.error;
}

CrossingAudit audit_no_crossing(std::span<const TrajectoryRecord> paths) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return paths[i].x0 < paths[j].x0; });
  CrossingAudit audit;
  audit.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p + 1 < order.size(); ++p) {
    const auto& lo = paths[order[p]];
    const auto& hi = paths[order[p + 1]];
    const std::size_t n = std::min(lo.t.size(), hi.t.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(lo.t[i] - hi.t[i]) > 1e-9 * std::max(1.0, std::abs(lo.t[i]))) {
        break;
      }
      const double gap = hi.x[i] - lo.x[i];
      audit.min_gap = std::min(audit.min_gap, gap);
      ++audit.pairs_checked;
      if (!(gap > 0.0)) {
        audit.ok = false;
      }
    }
  }
  return audit;
}

double match_height(const std::function<PotentialSpec(double)>& family, double target_T, double E0, double h_lo,
                    double h_hi) {
  auto f = [&](double h) { return std::norm(scattering_amplitudes(family(h), E0).t) - target_T; };
  const double f_lo = f(h_lo), f_hi = f(h_hi);
  if (f_lo * f_hi > 0.0) {
    throw Error(ErrorKind::bracket, "transmission does not cross the target inside the height bracket");
  }
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(f, h_lo, h_hi, f_lo, f_hi,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (root.first + root.second);
}

PotentialSpec double_barrier(double h, double a) {
  const std::array<Segment, 2> half{Segment{0.25, h}, Segment{0.75, 0.0}};
  return PotentialSpec::make_symmetric_composite(half, a);
}

}  // namespace cscat
