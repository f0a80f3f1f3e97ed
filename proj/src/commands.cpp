#include "cscat/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "cscat/bohm.hpp"
#include "cscat/error.hpp"
#include "cscat/grid_evolver.hpp"
#include "cscat/parallel.hpp"
#include "cscat/stationary.hpp"
#include "cscat/tunneling_times.hpp"
#include "cscat/wavepacket.hpp"

namespace cscat {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> cols) {
    for (const char* c : cols) {
      if (!header_.empty()) header_ += ',';
      header_ += c;
    }
    body_ << header_ << '\n';
  }
  Csv& row(std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      body_ << (first ? "" : ",") << num(v);
      first = false;
    }
    body_ << '\n';
    return *this;
  }
  Csv& raw(const std::string& line) {
    body_ << line << '\n';
    return *this;
  }
  std::string str() const { return body_.str(); }

 private:
  std::string header_;
  std::ostringstream body_;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

std::vector<double> uniform(double lo, double hi, double dx) {
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / dx + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + static_cast<double>(i) * dx;
  }
  return v;
}

SpectralAmplitude spectrum_of(const Scenario& sc, int n_k) {
  const auto& s = sc.spectrum;
  return gaussian_spectrum(s.k0, s.sigma_k, n_k, s.cutoff, s.x0, s.chirp);
}

std::string manifest(json j) { return j.dump(2) + "\n"; }

}  // namespace

OutputSet cmd_amplitudes(const Scenario& sc) {
  const auto& spec = sc.barrier;
  const auto energies = linspace(sc.amplitudes.e_min, sc.amplitudes.e_max, sc.amplitudes.n_e);
  struct Row {
    cplx r, t, atr, aref;
    double unit, ident, phase;
  };
  std::vector<Row> rows(energies.size());
  const bool symmetric = spec.is_symmetric();
  parallel_for(energies.size(), [&](std::size_t i) {
    const double e = energies[i];
    Row row;
    const auto amps = scattering_amplitudes(spec, e);
    row.r = amps.r;
    row.t = amps.t;
    if (symmetric) {
      const auto dec = decompose(spec, e);
      row.atr = dec.a_tr_in;
      row.aref = dec.a_ref_in;
    } else {
      row.atr = row.aref = cplx(kNaN, kNaN);
    }
    row.unit = std::norm(amps.r) + std::norm(amps.t) - 1.0;
    row.ident = amplitude_identity_residual(spec, e);
    row.phase = phase_relation_residual(spec, e);
    rows[i] = row;
  });

  Csv csv({"E", "Re_r", "Im_r", "Re_t", "Im_t", "T", "R", "Re_A_tr_in", "Im_A_tr_in", "Re_A_ref_in", "Im_A_ref_in",
           "unitarity_residual", "identity_residual", "phase_residual"});
  double max_unit = 0.0, max_ident = 0.0, max_phase = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row({energies[i], r.r.real(), r.r.imag(), r.t.real(), r.t.imag(), std::norm(r.t), std::norm(r.r), r.atr.real(),
             r.atr.imag(), r.aref.real(), r.aref.imag(), r.unit, r.ident, r.phase});
    max_unit = std::max(max_unit, std::abs(r.unit));
    max_ident = std::max(max_ident, std::abs(r.ident));
    max_phase = std::max(max_phase, std::abs(r.phase));
  }
  char footer[160];
  std::snprintf(footer, sizeof footer, "# max_unitarity_residual=%.3e max_identity_residual=%.3e max_phase_residual=%.3e",
                max_unit, max_ident, max_phase);
  csv.raw(footer);

  const std::string gp =
      "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'E'\n"
      "plot 'amplitudes.csv' using 1:6 with lines title 'T', '' using 1:7 with lines title 'R'\n";
  return {{"amplitudes.csv", csv.str(), true}, {"amplitudes.gp", gp, false}};
}

OutputSet cmd_decompose(const Scenario& sc) {
  const auto& spec = sc.barrier;
  if (!spec.is_symmetric()) {
    throw Error(ErrorKind::asymmetric_potential, "decomposition needs a mirror-symmetric barrier");
  }
  const auto xs = uniform(sc.decompose.x_min, sc.decompose.x_max, sc.decompose.dx);
  OutputSet out;
  json files = json::array();
  std::string gp = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\n";
  for (std::size_t e = 0; e < sc.decompose.energies.size(); ++e) {
    const double energy = sc.decompose.energies[e];
    const auto dec = decompose(spec, energy);
    const auto clipped = clip_channels(dec);
    Csv csv({"x", "Re_Psi_full", "Im_Psi_full", "Re_Psi_tr", "Im_Psi_tr", "Re_Psi_ref", "Im_Psi_ref", "Re_psi_tr",
             "Im_psi_tr", "Re_psi_ref", "Im_psi_ref", "J_full", "J_tr", "J_ref"});
    double oddness = 0.0, additivity = 0.0, current_defect = 0.0, ref_current = 0.0;
    const double xc = spec.midpoint();
    const double j_full_ref = dec.full.current(xc);
    for (double x : xs) {
      const cplx pf = dec.full.evaluate(x), pt = dec.tr_solution.evaluate(x), pr = dec.ref_solution.evaluate(x);
      const cplx ct = clipped.tr.evaluate(x), cr = clipped.ref.evaluate(x);
      const double jf = dec.full.current(x), jt = clipped.tr.current(x), jr = clipped.ref.current(x);
      csv.row({x, pf.real(), pf.imag(), pt.real(), pt.imag(), pr.real(), pr.imag(), ct.real(), ct.imag(), cr.real(),
               cr.imag(), jf, jt, jr});
      oddness = std::max(oddness, std::abs(pr + dec.ref_solution.evaluate(2.0 * xc - x)));
      additivity = std::max(additivity, std::abs(pf - pt - pr));
      current_defect = std::max(current_defect, std::abs(dec.tr_solution.current(x) - jf) / std::abs(j_full_ref));
      ref_current = std::max(ref_current, std::abs(dec.ref_solution.current(x)));
    }
    char name[64];
    std::snprintf(name, sizeof name, "decompose_%zu.csv", e);
    out.push_back({name, csv.str(), true});
    files.push_back({{"file", name},
                     {"E", energy},
                     {"T", dec.T},
                     {"R", dec.R},
                     {"A_tr_in", {dec.a_tr_in.real(), dec.a_tr_in.imag()}},
                     {"A_ref_in", {dec.a_ref_in.real(), dec.a_ref_in.imag()}},
                     {"midpoint_zero", std::abs(dec.ref_solution.evaluate(xc))},
                     {"oddness_defect", oddness},
                     {"additivity_defect", additivity},
                     {"tr_left_outgoing", std::abs(dec.tr_solution.left_asymptote().minus)},
                     {"tr_current_rel_defect", current_defect},
                     {"ref_current_max", ref_current},
                     {"abs2_A_tr_minus_T", std::abs(std::norm(dec.a_tr_in) - dec.T)}});
    gp += std::string(e == 0 ? "plot " : "replot ") + "'" + name + "' using 1:(($2)**2+($3)**2) with lines title 'E=" +
          num(energy) + " |Psi_full|^2', '' using 1:(($10)**2+($11)**2) with lines title '|psi_ref|^2'\n";
  }
  out.push_back({"decompose_manifest.json",
                 manifest({{"scenario_hash", sc.hash_hex()},
                           {"barrier", spec.to_json()},
                           {"x_grid", {{"x_min", sc.decompose.x_min}, {"x_max", sc.decompose.x_max}, {"dx", sc.decompose.dx}}},
                           {"energies", files}}),
                 false});
  out.push_back({"decompose.gp", gp, false});
  return out;
}

OutputSet cmd_evolve(const Scenario& sc) {
  const auto& spec = sc.barrier;
  const auto spectrum = spectrum_of(sc, sc.spectrum.n_k);
  const PacketCache cache(spec, spectrum);
  const XDomain domain{sc.grid.x_min, sc.grid.x_max, sc.grid.dx};

  std::optional<SpectralAmplitude> fine_spectrum;
  std::optional<PacketCache> fine_cache;
  if (sc.evolve.quadrature_check) {
    fine_spectrum = spectrum_of(sc, 2 * sc.spectrum.n_k);
    fine_cache.emplace(spec, *fine_spectrum);
  }

  const auto& times = sc.grid.times;
  std::vector<ChannelSnapshot> snaps;
  std::vector<double> qerr;
  for (double t : times) {
    snaps.push_back(measure_channels(cache, t, domain));
    if (fine_cache) {
      const auto fine = measure_channels(*fine_cache, t, XDomain{domain.x_min, domain.x_max, 0.5 * domain.dx});
      qerr.push_back(quadrature_discrepancy(snaps.back(), fine));
    } else {
      qerr.push_back(kNaN);
    }
  }

  Csv norms({"t", "norm_full", "norm_tr", "norm_ref", "tr_plus_ref_minus_1", "Re_overlap", "Im_overlap", "abs_overlap",
             "quadrature_error", "edge_density"});
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto& s = snaps[i];
    norms.row({s.t, s.norm[0], s.norm[1], s.norm[2], s.norm[1] + s.norm[2] - 1.0, s.overlap.real(), s.overlap.imag(),
               std::abs(s.overlap), qerr[i], s.edge_density});
  }

  const auto xs = uniform(sc.grid.x_min, sc.grid.x_max, sc.evolve.snapshot_dx);
  Csv snap({"t", "x", "Re_full", "Im_full", "abs2_full", "Re_tr", "Im_tr", "abs2_tr", "Re_ref", "Im_ref", "abs2_ref"});
  double additivity = 0.0;
  for (double t : times) {
    std::vector<cplx> f(xs.size()), tr(xs.size()), ref(xs.size());
    cache.evaluate(xs, t, f, tr, ref);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      snap.row({t, xs[i], f[i].real(), f[i].imag(), std::norm(f[i]), tr[i].real(), tr[i].imag(), std::norm(tr[i]),
                ref[i].real(), ref[i].imag(), std::norm(ref[i])});
      additivity = std::max(additivity, std::abs(f[i] - tr[i] - ref[i]));
    }
  }

  // Per-channel norm statistics.
  json stats = json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (const auto& s : snaps) mean += s.norm[c];
    mean /= static_cast<double>(snaps.size());
    double var = 0.0, drift = 0.0;
    for (const auto& s : snaps) {
      var += (s.norm[c] - mean) * (s.norm[c] - mean);
      drift = std::max(drift, std::abs(s.norm[c] - snaps.front().norm[c]) / std::abs(mean));
    }
    const double rel_std = std::sqrt(var / static_cast<double>(snaps.size())) / std::abs(mean);
    stats[to_string(static_cast<Channel>(c))] = {{"mean", mean}, {"rel_stddev", rel_std}, {"max_rel_drift", drift}};
  }
  double max_tr_r = 0.0, max_re = 0.0, max_q = 0.0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    max_tr_r = std::max(max_tr_r, std::abs(snaps[i].norm[1] + snaps[i].norm[2] - 1.0));
    max_re = std::max(max_re, std::abs(snaps[i].overlap.real()));
    if (std::isfinite(qerr[i])) max_q = std::max(max_q, qerr[i]);
  }

  OutputSet out;
  json oracle_json = nullptr;
  if (sc.evolve.oracle.enabled) {
    const auto& o = sc.evolve.oracle;
    const auto gx = uniform(o.x_min, o.x_max, o.dx);
    auto field = synthesize(cache, Channel::full, spectrum, gx, 0.0);
    const double k_max = spectrum.k.back();
    GridEvolver ev(spec, gx.front(), o.dx, gx.size(), o.dt, k_max);
    const double n0 = ev.norm(field.psi);
    const auto per = static_cast<std::size_t>(std::llround(o.compare_every / o.dt));
    Csv ocsv({"t", "l2_distance", "grid_norm_drift"});
    double t = 0.0, max_l2 = 0.0, max_drift = 0.0;
    while (t + 0.5 * o.compare_every <= o.t_end) {
      ev.advance(field.psi, per);
      t += static_cast<double>(per) * o.dt;
      const auto ref = synthesize(cache, Channel::full, spectrum, gx, t);
      const double l2 = l2_distance(field.psi, ref.psi, o.dx);
      const double drift = ev.norm(field.psi) - n0;
      ocsv.row({t, l2, drift});
      max_l2 = std::max(max_l2, l2);
      max_drift = std::max(max_drift, std::abs(drift));
    }
    out.push_back({"oracle.csv", ocsv.str(), true});
    oracle_json = {{"x_min", o.x_min}, {"x_max", o.x_max}, {"dx", o.dx}, {"dt", o.dt}, {"t_end", o.t_end},
                   {"max_l2_distance", max_l2}, {"max_norm_drift", max_drift}};
  }

  out.push_back({"norms.csv", norms.str(), true});
  out.push_back({"snapshots.csv", snap.str(), true});
  out.push_back({"evolve_manifest.json",
                 manifest({{"scenario_hash", sc.hash_hex()},
                           {"barrier", spec.to_json()},
                           {"spectrum",
                            {{"k0", sc.spectrum.k0}, {"sigma_k", sc.spectrum.sigma_k}, {"x0", sc.spectrum.x0},
                             {"n_k", sc.spectrum.n_k}, {"cutoff", sc.spectrum.cutoff}, {"chirp", sc.spectrum.chirp},
                             {"rule", spectrum.rule}}},
                           {"snapshot_times", times},
                           {"norm_grid", {{"x_min", domain.x_min}, {"x_max", domain.x_max}, {"dx", domain.dx}}},
                           {"snapshot_grid", {{"x_min", xs.front()}, {"x_max", xs.back()}, {"dx", sc.evolve.snapshot_dx}}},
                           {"packet_T", cache.packet_transmission()},
                           {"packet_R", cache.packet_reflection()},
                           {"norms", stats},
                           {"max_abs_tr_plus_ref_minus_1", max_tr_r},
                           {"max_abs_re_overlap", max_re},
                           {"max_quadrature_error", max_q},
                           {"late_abs_overlap", std::abs(snaps.back().overlap)},
                           {"additivity_defect", additivity},
                           {"oracle", oracle_json}}),
                 false});
  out.push_back({"evolve.gp",
                 "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n"
                 "plot 'norms.csv' using 1:3 with linespoints title 'tr', '' using 1:4 with linespoints title 'ref', "
                 "'' using 1:2 with linespoints title 'full'\n",
                 false});
  return out;
}

OutputSet cmd_times(const Scenario& sc) {
  const auto& spec = sc.barrier;
  const auto& omegas = sc.times.omegas;
  const DwellInterval interval = sc.times.dwell_interval
                                     ? DwellInterval{sc.times.dwell_interval->first, sc.times.dwell_interval->second}
                                     : DwellInterval{spec.left_edge(), spec.right_edge()};
  const auto& energies = sc.times.energies;
  struct Row {
    double T, R, df, dt, dr, lt, lr, gd, rt, rr, zt, zr, defect, interference;
  };
  std::vector<Row> rows(energies.size());
  parallel_for(energies.size(), [&](std::size_t i) {
    const double e = energies[i];
    const auto dec = decompose(spec, e);
    Row r{};
    r.T = dec.T;
    r.R = dec.R;
    r.df = dwell_time(dec, Channel::full, interval);
    r.gd = group_delay(spec, e).time;
    auto channel = [&](Channel c, double& dwell, double& larmor, double& res, double& z) {
      try {
        dwell = dwell_time(dec, c, interval);
        const auto l = larmor_time(spec, e, c, omegas);
        larmor = l.time, res = l.residual, z = l.out_of_plane;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::empty_channel) throw;
        dwell = larmor = res = z = kNaN;
      }
    };
    channel(Channel::tr, r.dt, r.lt, r.rt, r.zt);
    channel(Channel::ref, r.dr, r.lr, r.rr, r.zr);
    r.interference = dwell_interference(dec, interval);
    const double weighted = (std::isnan(r.dt) ? 0.0 : r.T * r.dt) + (std::isnan(r.dr) ? 0.0 : r.R * r.dr);
    r.defect = weighted - r.df;
    rows[i] = r;
  });

  Csv csv({"E", "T", "R", "dwell_full", "dwell_tr", "dwell_ref", "larmor_tr", "larmor_ref", "group_delay",
           "residual_tr", "residual_ref", "reldiff_tr", "reldiff_ref", "larmor_z_tr", "larmor_z_ref",
           "weighted_defect", "interference_term"});
  double max_rel = 0.0, max_defect = 0.0, max_closed = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double rel_t = std::abs(r.lt - r.dt) / r.dt;
    const double rel_r = std::abs(r.lr - r.dr) / r.dr;
    csv.row({energies[i], r.T, r.R, r.df, r.dt, r.dr, r.lt, r.lr, r.gd, r.rt, r.rr, rel_t, rel_r, r.zt, r.zr, r.defect,
             r.interference});
    if (std::isfinite(rel_t)) max_rel = std::max(max_rel, rel_t);
    if (std::isfinite(rel_r)) max_rel = std::max(max_rel, rel_r);
    max_defect = std::max(max_defect, std::abs(r.defect));
    max_closed = std::max(max_closed, std::abs(r.defect + r.interference));
  }

  OutputSet out{{"times.csv", csv.str(), true}};
  json hartman = nullptr;
  if (sc.times.hartman.enabled) {
    const auto& h = sc.times.hartman;
    Csv hc({"d", "group_delay", "dwell_full", "rel_change"});
    json rowsj = json::array();
    double prev = kNaN;
    for (double d : h.widths) {
      const auto s = PotentialSpec::make_rectangular(h.height, d, 0.0);
      const double tg = group_delay(s, h.energy).time;
      const double dw = dwell_time(s, h.energy, Channel::full);
      const double change = std::isnan(prev) ? kNaN : std::abs(tg - prev) / std::abs(prev);
      hc.row({d, tg, dw, change});
      rowsj.push_back({{"d", d}, {"group_delay", tg}, {"rel_change", finite_or_null(change)}});
      prev = tg;
    }
    out.push_back({"hartman.csv", hc.str(), true});
    hartman = {{"height", h.height}, {"energy", h.energy}, {"rows", rowsj}};
  }
  out.push_back({"times_manifest.json",
                 manifest({{"scenario_hash", sc.hash_hex()},
                           {"barrier", spec.to_json()},
                           {"omegas", omegas},
                           {"dwell_interval", {interval.x1, interval.x2}},
                           {"max_larmor_dwell_reldiff", max_rel},
                           {"max_weighted_identity_defect", max_defect},
                           {"max_defect_with_interference", max_closed},
                           {"hartman", hartman}}),
                 false});
  out.push_back({"times.gp",
                 "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'E'\n"
                 "plot 'times.csv' using 1:5 with lines title 'dwell tr', '' using 1:7 with points title 'larmor tr', "
                 "'' using 1:6 with lines title 'dwell ref', '' using 1:8 with points title 'larmor ref', "
                 "'' using 1:9 with lines title 'group delay'\n",
                 false});
  return out;
}

namespace {

struct BohmRun {
  Horizon horizon;
  CriticalPoint cp;
  double packet_T = 0.0;
};

BohmRun critical_point_for(const Scenario& sc, const PotentialSpec& spec, const SpectralAmplitude& spectrum,
                           const XDomain& domain, std::vector<TrajectoryRecord>* ensemble, InitialDensity* density_out) {
  const PacketCache cache(spec, spectrum);
  BohmRun run;
  run.packet_T = cache.packet_transmission();
  HorizonControls hc;
  hc.margin = sc.bohm.margin;
  hc.leak = sc.bohm.leak;
  run.horizon = packet_horizon(cache, spectrum, hc);
  const auto density = initial_density(cache, 0.0, domain);
  const GuidanceField field(cache, kNodeFloor * density.peak);
  BohmSetup setup;
  setup.t0 = 0.0;
  setup.horizon = run.horizon.time;
  setup.extend_factor = sc.bohm.extend_factor;
  setup.controls.sample_dt = sc.bohm.sample_dt;

  const double sigma_x = spectrum.sigma_x();
  const double tol_x = sc.bohm.tol_x_rel * sigma_x;
  const auto bracket = sc.bohm.bracket.value_or(std::make_pair(sc.spectrum.x0 - 4.0 * sigma_x, sc.spectrum.x0 + 4.0 * sigma_x));
  run.cp = find_critical_point(field, spec, setup, bracket.first, bracket.second, tol_x);
  check_quantile_identity(run.cp, cache, 0.0, run.horizon.leak, domain);

  if (ensemble) {
    const auto starts = quantile_starts(density, static_cast<std::size_t>(sc.bohm.ensemble));
    ensemble->resize(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { (*ensemble)[i] = classify_start(field, spec, starts[i], setup); });
  }
  if (density_out) {
    *density_out = density;
  }
  return run;
}

}  // namespace

OutputSet cmd_bohm(const Scenario& sc) {
  const auto& spec = sc.barrier;
  const auto spectrum = spectrum_of(sc, sc.spectrum.n_k);
  const XDomain domain{sc.grid.x_min, sc.grid.x_max, sc.grid.dx};
  std::vector<TrajectoryRecord> ensemble;
  InitialDensity density;
  const auto run = critical_point_for(sc, spec, spectrum, domain, &ensemble, &density);

  Csv traj({"id", "x0", "fate", "t", "x"});
  std::size_t transmitted = 0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& r = ensemble[i];
    transmitted += r.fate == Fate::transmitted ? 1 : 0;
    for (std::size_t s = 0; s < r.t.size(); ++s) {
      traj.raw(std::to_string(i) + "," + num(r.x0) + "," + to_string(r.fate) + "," + num(r.t[s]) + "," + num(r.x[s]));
    }
  }
  const auto audit = audit_no_crossing(ensemble);
  const double n = static_cast<double>(ensemble.size());
  const double fraction = static_cast<double>(transmitted) / n;

  const auto& cp = run.cp;
  json report = {{"scenario_hash", sc.hash_hex()},
                 {"x_star", cp.x_star},
                 {"tol_x", cp.tol_x},
                 {"quantile_oracle_residual", cp.residual},
                 {"combined_tolerance", cp.tolerance},
                 {"quantile_identity_holds", cp.residual <= cp.tolerance},
                 {"mass_right_of_x_star", cp.mass_right},
                 {"packet_T", cp.packet_T},
                 {"density_at_x_star", cp.density_at_x_star},
                 {"horizon", run.horizon.time},
                 {"horizon_leak", cp.horizon_leak},
                 {"quadrature_error", cp.quadrature_error},
                 {"bracket", {cp.bracket_lo, cp.bracket_hi}},
                 {"bisection_iterations", cp.iterations},
                 {"ensemble",
                  {{"size", ensemble.size()},
                   {"transmitted", transmitted},
                   {"fraction", fraction},
                   {"fraction_defect", std::abs(fraction - run.packet_T)},
                   {"resolution", 1.0 / n},
                   {"no_crossing", audit.ok},
                   {"pairs_checked", audit.pairs_checked},
                   {"min_gap", audit.min_gap}}}};

  OutputSet out{{"trajectories.csv", traj.str(), true}, {"critical_point.json", manifest(report), false}};

  if (sc.bohm.shape_pair.enabled) {
    const double e0 = sc.spectrum.k0 * sc.spectrum.k0;
    const double target = std::norm(scattering_amplitudes(spec, e0).t);
    const double a = spec.left_edge();
    const double h = match_height([a](double hh) { return double_barrier(hh, a); }, target, e0,
                                  sc.bohm.shape_pair.h_lo, sc.bohm.shape_pair.h_hi);
    const auto second = double_barrier(h, a);
    const auto run2 = critical_point_for(sc, second, spectrum, domain, nullptr, nullptr);
    const double diff = std::abs(run2.cp.x_star - cp.x_star);
    out.push_back({"shape_pair.json",
                   manifest({{"scenario_hash", sc.hash_hex()},
                             {"E0", e0},
                             {"matched_T_at_E0", target},
                             {"first", {{"barrier", spec.to_json()}, {"x_star", cp.x_star}, {"packet_T", run.packet_T},
                                        {"quantile_residual", cp.residual}, {"tolerance", cp.tolerance}}},
                             {"second", {{"barrier", second.to_json()}, {"height", h}, {"x_star", run2.cp.x_star},
                                         {"packet_T", run2.packet_T}, {"quantile_residual", run2.cp.residual},
                                         {"tolerance", run2.cp.tolerance}}},
                             {"abs_difference", diff},
                             {"threshold", 5.0 * cp.tol_x},
                             {"shape_dependent", diff > 5.0 * cp.tol_x}}),
                   false});
  }
  out.push_back({"bohm.gp",
                 "set datafile separator ','\nset xlabel 't'\nset ylabel 'x'\n"
                 "plot 'trajectories.csv' every ::1 using 4:5 with dots notitle\n",
                 false});
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"amplitudes", "decompose", "evolve", "times", "bohm"};
  return names;
}

OutputSet run_named(const std::string& command, const Scenario& sc) {
  if (command == "amplitudes") return cmd_amplitudes(sc);
  if (command == "decompose") return cmd_decompose(sc);
  if (command == "evolve") return cmd_evolve(sc);
  if (command == "times") return cmd_times(sc);
  if (command == "bohm") return cmd_bohm(sc);
  throw Error(ErrorKind::schema_violation, "unknown command " + command);
}

std::string banner_line(const std::string& command, const Scenario& sc) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string("# cscat ") + kVersion + " " + command + " scenario=" + sc.hash_hex() + " generated=" + stamp;
}

void write_outputs(const OutputSet& files, const std::filesystem::path& dir, const std::string& banner) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
  }
  std::vector<std::filesystem::path> staged;
  for (const auto& f : files) {
    const auto tmp = dir / (f.name + ".part");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (f.csv && !banner.empty()) {
      out << banner << '\n';
    }
    out << f.body;
    out.close();
    if (!out) {
      for (const auto& p : staged) std::filesystem::remove(p, ec);
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::io, "cannot write " + tmp.string());
    }
    staged.push_back(tmp);
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::filesystem::rename(staged[i], dir / files[i].name, ec);
    if (ec) {
      throw Error(ErrorKind::io, "cannot rename " + staged[i].string());
    }
  }
}

int run_command(const std::string& command, const RunOptions& opts, std::ostream& err) {
  set_thread_count(opts.threads);
  Scenario sc;
  try {
    sc = load_scenario(opts.scenario);
  } catch (const Error& e) {
    err << "cscat " << command << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "cscat " << command << ": " << e.what() << '\n';
    return kExitValidation;
  }

  OutputSet files;
  try {
    files = run_named(command, sc);
  } catch (const Error& e) {
    err << "cscat " << command << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::io ? kExitIo : kExitComputation;
  } catch (const std::exception& e) {
    err << "cscat " << command << ": " << e.what() << '\n';
    return kExitComputation;
  }

  const auto dir = !opts.out_dir.empty() ? opts.out_dir
                   : !sc.output_dir.empty() ? std::filesystem::path(sc.output_dir)
                                            : std::filesystem::path(".");
  try {
    write_outputs(files, dir, opts.banner ? banner_line(command, sc) : std::string());
  } catch (const std::exception& e) {
    err << "cscat " << command << ": " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace cscat
