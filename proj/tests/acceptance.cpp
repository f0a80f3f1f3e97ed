// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run one

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "cscat/bohm.hpp"
#include "cscat/commands.hpp"
#include "cscat/error.hpp"
#include "cscat/grid_evolver.hpp"
#include "cscat/parallel.hpp"
#include "cscat/scenario.hpp"
#include "cscat/tunneling_times.hpp"
#include "oracles.hpp"

using namespace cscat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<PotentialSpec> shapes() {
  const std::vector<Segment> composite{{0.3, 1.5}, {0.4, 3.0}};
  const std::vector<Segment> well{{0.5, 2.0}, {0.5, -1.0}};
  return {PotentialSpec::make_rectangular(2.0, 1.0, 0.0), PotentialSpec::make_symmetric_composite(composite, -1.0),
          PotentialSpec::make_symmetric_composite(well, 3.0), double_barrier(6.5, 0.0),
          PotentialSpec::sample_symmetric_function([](double x) { return 2.5 * std::exp(-x * x); }, 4.0, 16, -2.0)};
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

const fs::path& source_dir() {
  static const fs::path p = CSCAT_SOURCE_DIR;
  return p;
}

Scenario reference() { return load_scenario(source_dir() / "scenarios" / "reference.json"); }

SpectralAmplitude spectrum_for(const Scenario& sc, int n_k) {
  const auto& s = sc.spectrum;
  return gaussian_spectrum(s.k0, s.sigma_k, n_k, s.cutoff, s.x0, s.chirp);
}

Outcome criterion1() {
  Outcome o;
  double unit = 0.0, ident = 0.0;
  const auto es = linspace(0.05, 8.0, 200);
  for (const auto& spec : shapes()) {
    for (double e : es) {
      const auto a = scattering_amplitudes(spec, e);
      unit = std::max(unit, std::abs(std::norm(a.r) + std::norm(a.t) - 1.0));
      ident = std::max(ident, std::abs(amplitude_identity_residual(spec, e)));
    }
  }
  const auto control = PotentialSpec::from_segments(0.0, {{0.5, 3.0}, {0.5, 0.5}});
  double violation = 0.0;
  for (double e : es) violation = std::max(violation, std::abs(amplitude_identity_residual(control, e)));
  o.require(unit < 1e-12, "max unitarity residual " + fmt("%.2e", unit));
  o.require(ident < 1e-10, "max identity residual " + fmt("%.2e", ident));
  o.require(violation > 1e-3, "asymmetric control violation " + fmt("%.3e", violation));
  return o;
}

Outcome criterion2() {
  Outcome o;
  double mid = 0.0, odd = 0.0, out = 0.0, jtr = 0.0, jref = 0.0;
  for (const auto& spec : shapes()) {
    const double xc = spec.midpoint();
    for (double e : linspace(0.05, 8.0, 200)) {
      const auto dec = decompose(spec, e);
      mid = std::max(mid, std::abs(dec.ref_solution.evaluate(xc)));
      out = std::max(out, std::abs(dec.tr_solution.left_asymptote().minus));
      const double jf = dec.full.current(xc);
      for (double d = 0.0; d <= 8.0; d += 0.05) {
        for (double x : {xc - d, xc + d}) {
          jtr = std::max(jtr, std::abs(dec.tr_solution.current(x) - dec.full.current(x)) / std::abs(jf));
          jref = std::max(jref, std::abs(dec.ref_solution.current(x)));
        }
        odd = std::max(odd, std::abs(dec.ref_solution.evaluate(xc + d) + dec.ref_solution.evaluate(xc - d)));
      }
    }
  }
  o.require(mid < 1e-12, "Psi_ref(x_c) " + fmt("%.2e", mid));
  o.require(odd < 1e-10, "oddness " + fmt("%.2e", odd));
  o.require(out < 1e-12, "Psi_tr left outgoing " + fmt("%.2e", out));
  o.require(jtr < 1e-10, "J_tr/J_full rel " + fmt("%.2e", jtr));
  o.require(jref < 1e-12, "J_ref " + fmt("%.2e", jref));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto sc = reference();
  const auto spectrum = spectrum_for(sc, sc.spectrum.n_k);
  const auto fine_spectrum = spectrum_for(sc, 2 * sc.spectrum.n_k);
  const PacketCache cache(sc.barrier, spectrum);
  const PacketCache fine_cache(sc.barrier, fine_spectrum);
  const XDomain dom{sc.grid.x_min, sc.grid.x_max, sc.grid.dx};
  const XDomain fine_dom{dom.x_min, dom.x_max, 0.5 * dom.dx};

  std::vector<ChannelSnapshot> snaps;
  double qerr = 0.0;
  for (double t : sc.grid.times) {
    snaps.push_back(measure_channels(cache, t, dom));
    qerr = std::max(qerr, quadrature_discrepancy(snaps.back(), measure_channels(fine_cache, t, fine_dom)));
  }
  double drift[3] = {0.0, 0.0, 0.0}, tr_r = 0.0, re = 0.0;
  for (const auto& s : snaps) {
    for (int c = 0; c < 3; ++c) drift[c] = std::max(drift[c], std::abs(s.norm[c] / snaps.front().norm[c] - 1.0));
    tr_r = std::max(tr_r, std::abs(s.norm[1] + s.norm[2] - 1.0));
    re = std::max(re, std::abs(s.overlap.real()));
  }
  const double T = cache.packet_transmission(), R = cache.packet_reflection();
  const double late = std::abs(snaps.back().overlap);
  o.require(snaps.size() >= 10, std::to_string(snaps.size()) + " times");
  o.require(drift[0] < 1e-6, "full norm drift " + fmt("%.2e", drift[0]));
  o.require(drift[1] < 1e-6, "tr norm drift " + fmt("%.2e", drift[1]));
  o.require(drift[2] < 1e-6, "ref norm drift " + fmt("%.2e", drift[2]));
  o.require(tr_r < 1e-8, "max|T+R-1| " + fmt("%.2e", tr_r));
  o.require(re < 10.0 * qerr, "max|Re overlap| " + fmt("%.2e", re) + " vs 10x quadrature " + fmt("%.2e", 10.0 * qerr));
  o.require(late < 1e-4 * std::sqrt(T * R), "late |overlap| " + fmt("%.2e", late));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto sc = reference();
  const auto spectrum = spectrum_for(sc, sc.spectrum.n_k);
  const PacketCache cache(sc.barrier, spectrum);
  const auto& oc = sc.evolve.oracle;
  std::vector<double> gx;
  const auto n = static_cast<std::size_t>(std::llround((oc.x_max - oc.x_min) / oc.dx));
  for (std::size_t i = 0; i <= n; ++i) gx.push_back(oc.x_min + static_cast<double>(i) * oc.dx);
  auto field = synthesize(cache, Channel::full, spectrum, gx, 0.0);
  const auto steps = static_cast<std::size_t>(std::llround(oc.t_end / oc.dt));
  const auto evolved = grid_evolve_oracle(field, sc.barrier, oc.dt, steps, spectrum.k.back());
  const auto exact = synthesize(cache, Channel::full, spectrum, gx, evolved.t);
  const double l2 = l2_distance(evolved.psi, exact.psi, oc.dx);
  o.require(l2 < 1e-4, "barrier L2 at t=" + fmt("%.0f", evolved.t) + " " + fmt("%.2e", l2));

  const auto zero = PotentialSpec::make_rectangular(0.0, 1.0, -0.5);
  WavePacketField g;
  for (std::size_t i = 0; i <= 15000; ++i) {
    g.x.push_back(-150.0 + 0.02 * static_cast<double>(i));
    g.psi.push_back(free_gaussian(g.x.back(), 0.0, 1.0, 10.0, -30.0));
  }
  const auto free_out = grid_evolve_oracle(g, zero, 0.0005, 20000, 1.5);
  std::vector<cplx> fx;
  for (double x : free_out.x) fx.push_back(free_gaussian(x, free_out.t, 1.0, 10.0, -30.0));
  const double l2f = l2_distance(free_out.psi, fx, 0.02);
  o.require(l2f < 1e-6, "free Gaussian L2 " + fmt("%.2e", l2f));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto sc = reference();
  const auto& spec = sc.barrier;
  const DwellInterval iv{spec.left_edge(), spec.right_edge()};
  double rel = 0.0, defect = 0.0, closed = 0.0;
  int sub = 0, above = 0;
  for (double e : linspace(0.1, 6.0, 20)) {
    (e < 2.0 ? sub : above)++;
    const auto dec = decompose(spec, e);
    const double tt = dwell_time(dec, Channel::tr, iv), tr = dwell_time(dec, Channel::ref, iv);
    const double full = dwell_time(dec, Channel::full, iv);
    rel = std::max(rel, std::abs(larmor_time(spec, e, Channel::tr, sc.times.omegas).time - tt) / tt);
    rel = std::max(rel, std::abs(larmor_time(spec, e, Channel::ref, sc.times.omegas).time - tr) / tr);
    const double d = dec.T * tt + dec.R * tr - full;
    defect = std::max(defect, std::abs(d));
    closed = std::max(closed, std::abs(d + dwell_interference(dec, iv)));
  }
  o.require(sub > 0 && above > 0, std::to_string(sub) + " sub-barrier, " + std::to_string(above) + " above-barrier energies");
  o.require(rel < 1e-3, "max Larmor/dwell rel diff " + fmt("%.2e", rel));
  o.require(defect < 1e-8, "max |T tau_tr + R tau_ref - tau_full| " + fmt("%.3e", defect) +
                               " (closes with interference term to " + fmt("%.1e", closed) + ")");
  const auto& h = sc.times.hartman;
  const double g8 = group_delay(PotentialSpec::make_rectangular(h.height, 8.0, 0.0), h.energy).time;
  const double g10 = group_delay(PotentialSpec::make_rectangular(h.height, 10.0, 0.0), h.energy).time;
  o.require(std::abs(g10 - g8) / g8 < 0.05, "Hartman change d=8->10 " + fmt("%.2e", std::abs(g10 - g8) / g8));
  return o;
}

struct BohmResult {
  CriticalPoint cp;
  double packet_T = 0.0;
};

BohmResult critical_point(const Scenario& sc, const PotentialSpec& spec, std::vector<TrajectoryRecord>* ensemble) {
  const auto spectrum = spectrum_for(sc, sc.spectrum.n_k);
  const PacketCache cache(spec, spectrum);
  const XDomain dom{sc.grid.x_min, sc.grid.x_max, sc.grid.dx};
  HorizonControls hc;
  hc.margin = sc.bohm.margin;
  hc.leak = sc.bohm.leak;
  const auto horizon = packet_horizon(cache, spectrum, hc);
  const auto density = initial_density(cache, 0.0, dom);
  const GuidanceField field(cache, kNodeFloor * density.peak);
  BohmSetup setup;
  setup.horizon = horizon.time;
  setup.extend_factor = sc.bohm.extend_factor;
  setup.controls.sample_dt = sc.bohm.sample_dt;
  const double sx = spectrum.sigma_x();
  BohmResult r;
  r.cp = find_critical_point(field, spec, setup, sc.spectrum.x0 - 4.0 * sx, sc.spectrum.x0 + 4.0 * sx,
                             sc.bohm.tol_x_rel * sx);
  check_quantile_identity(r.cp, cache, 0.0, horizon.leak, dom);
  r.packet_T = cache.packet_transmission();
  if (ensemble) {
    const auto starts = quantile_starts(density, static_cast<std::size_t>(sc.bohm.ensemble));
    ensemble->resize(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { (*ensemble)[i] = classify_start(field, spec, starts[i], setup); });
  }
  return r;
}

Outcome criterion6() {
  Outcome o;
  const auto sc = reference();
  std::vector<TrajectoryRecord> paths;
  const auto one = critical_point(sc, sc.barrier, &paths);
  const auto audit = audit_no_crossing(paths);
  std::size_t transmitted = 0;
  for (const auto& p : paths) transmitted += p.fate == Fate::transmitted;
  o.require(paths.size() == 64 && audit.ok,
            std::to_string(paths.size()) + " trajectories, no crossing (min gap " + fmt("%.3f", audit.min_gap) + ", " +
                std::to_string(transmitted) + " transmitted)");
  o.require(one.cp.residual < one.cp.tolerance, "x*=" + fmt("%.4f", one.cp.x_star) + " quantile residual " +
                                                    fmt("%.2e", one.cp.residual) + " < " + fmt("%.2e", one.cp.tolerance));

  const auto& rect = sc.barrier;
  const double target = std::norm(scattering_amplitudes(rect, sc.spectrum.k0 * sc.spectrum.k0).t);
  const double h = match_height([](double v) { return double_barrier(v, 0.0); }, target,
                                sc.spectrum.k0 * sc.spectrum.k0, sc.bohm.shape_pair.h_lo, sc.bohm.shape_pair.h_hi);
  const auto two = critical_point(sc, double_barrier(h, 0.0), nullptr);
  const double tol_x = sc.bohm.tol_x_rel * (0.5 / sc.spectrum.sigma_k);
  const double gap = std::abs(one.cp.x_star - two.cp.x_star);
  o.require(gap > 5.0 * tol_x, "shape pair |x*1-x*2| " + fmt("%.4f", gap) + " > " + fmt("%.3f", 5.0 * tol_x) +
                                   " (h=" + fmt("%.6f", h) + ", packet T " + fmt("%.5f", one.packet_T) + " vs " +
                                   fmt("%.5f", two.packet_T) + ")");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto rect = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  const double t1 = std::norm(scattering_amplitudes(rect, 1.0).t);
  const double res = std::norm(scattering_amplitudes(rect, 2.0 + std::numbers::pi * std::numbers::pi).t);
  o.require(std::abs(t1 - 0.41998) < 1e-5 && std::abs(t1 - oracle::rect_T(2.0, 1.0, 1.0)) < 1e-12,
            "T(E=1) " + fmt("%.8f", t1));
  o.require(std::abs(res - 1.0) < 1e-10, "T(2+pi^2) - 1 = " + fmt("%.2e", res - 1.0));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion8() {
  Outcome o;
  const fs::path cli = CSCAT_CLI_PATH;
  const auto base = fs::temp_directory_path() / "cscat_acceptance_8";
  fs::remove_all(base);
  const auto scen = source_dir() / "scenarios" / "reference.json";
  std::size_t files = 0, differing = 0;
  for (const auto& cmd : command_names()) {
    for (const char* run : {"a", "b"}) {
      const auto out = base / cmd / run;
      const std::string line = "\"" + cli.string() + "\" " + cmd + " --scenario \"" + scen.string() + "\" --out \"" +
                               out.string() + "\" --no-banner --threads 0 > /dev/null 2>&1";
      const int st = std::system(line.c_str());
      const int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
      if (code != 0) o.require(false, cmd + " exited " + std::to_string(code));
    }
    for (const auto& e : fs::directory_iterator(base / cmd / "a")) {
      ++files;
      if (slurp(e.path()) != slurp(base / cmd / "b" / e.path().filename())) {
        ++differing;
        o.require(false, cmd + "/" + e.path().filename().string() + " differs");
      }
    }
  }
  o.require(differing == 0 && files > 0, std::to_string(files) + " files compared, " + std::to_string(differing) +
                                             " differ");
  fs::remove_all(base);
  return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<const char*, std::function<Outcome()>>> list{
      {"unitarity and symmetric-barrier identity", criterion1},
      {"channel decomposition invariants", criterion2},
      {"dynamical channel norms and overlap", criterion3},
      {"spectral synthesis vs grid oracle", criterion4},
      {"Larmor/dwell timing suite", criterion5},
      {"Bohmian ensemble and critical point", criterion6},
      {"closed-form anchors", criterion7},
      {"CLI determinism", criterion8},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria().size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria().size());
    return 2;
  }
  set_thread_count(0);
  bool all = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome r;
    try {
      r = criteria()[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    std::printf("CRITERION %zu %s: %s -- %s\n", i + 1, r.pass ? "PASS" : "FAIL", criteria()[i].first, r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
