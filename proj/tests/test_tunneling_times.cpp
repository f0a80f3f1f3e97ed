#include <doctest.h>

#include <cmath>
#include <vector>

#include "cscat/error.hpp"
#include "cscat/tunneling_times.hpp"
#include "oracles.hpp"

using namespace cscat;

namespace {

const PotentialSpec& rect() {
  static const PotentialSpec s = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  return s;
}

std::vector<PotentialSpec> shapes() {
  const std::vector<Segment> two{{0.3, 1.5}, {0.4, 3.0}};
  return {rect(), PotentialSpec::make_symmetric_composite(two, -1.0),
          PotentialSpec::sample_symmetric_function([](double x) { return 2.5 * std::exp(-x * x); }, 4.0, 12, -2.0)};
}

std::vector<double> grid20() {
  std::vector<double> e;
  for (int i = 0; i < 20; ++i) {
    e.push_back(0.1 + (6.0 - 0.1) * i / 19.0);
  }
  return e;
}

double simpson_dwell(const StationaryState& psi, double x1, double x2, double jin) {
  return oracle::simpson([&](double x) { return std::norm(psi.evaluate(x)); }, x1, x2, 20000) / jin;
}

}  // namespace

TEST_CASE("full dwell time against the closed form and a fine Simpson sum") {
  for (double e : {0.2, 0.7, 1.0, 1.6, 1.95}) {
    CHECK(std::abs(dwell_time(rect(), e, Channel::full) - oracle::rect_dwell_below(2.0, 1.0, e)) <
          1e-12 * oracle::rect_dwell_below(2.0, 1.0, e));
  }
  const auto dec = decompose(rect(), 1.0);
  const auto clipped = clip_channels(dec);
  const double k = dec.k;
  // Channel densities are those of the clipped states: psi_tr becomes psi_full past x_c, psi_ref vanishes.
  const double tr = (simpson_dwell(clipped.tr, 0.0, 0.5, 1.0) + simpson_dwell(clipped.tr, 0.5, 1.0, 1.0)) /
                    (2.0 * k * std::norm(dec.a_tr_in));
  const double rf = simpson_dwell(clipped.ref, 0.0, 0.5, 1.0) / (2.0 * k * std::norm(dec.a_ref_in));
  CHECK(std::abs(dwell_time(dec, Channel::tr, {0.0, 1.0}) - tr) < 1e-12);
  CHECK(std::abs(dwell_time(dec, Channel::ref, {0.0, 1.0}) - rf) < 1e-12);
  // Custom interval reaching outside the barrier.
  CHECK(std::abs(dwell_time(dec, Channel::full, {-3.0, 2.0}) -
                 (oracle::simpson([&](double x) { return std::norm(dec.full.evaluate(x)); }, -3.0, 0.0, 20000) +
                  oracle::simpson([&](double x) { return std::norm(dec.full.evaluate(x)); }, 0.0, 1.0, 20000) +
                  oracle::simpson([&](double x) { return std::norm(dec.full.evaluate(x)); }, 1.0, 2.0, 20000)) /
                     (2.0 * k)) < 1e-11);
  CHECK_THROWS_AS(dwell_time(dec, Channel::full, {1.0, 0.0}), Error);
}

TEST_CASE("zero barrier reads the free transit time") {
  const auto z = PotentialSpec::make_rectangular(0.0, 1.0, -0.5);
  CHECK(std::abs(dwell_time(z, 1.0, Channel::full) - 0.5) < 1e-14);
  CHECK(std::abs(dwell_time(z, 1.0, Channel::tr) - 0.5) < 1e-14);
  CHECK(std::abs(larmor_time(z, 1.0, Channel::tr, default_omegas()).time - 0.5) < 1e-9);
  CHECK(std::abs(larmor_time(z, 1.0, Channel::full, default_omegas()).time - 0.5) < 1e-9);
  CHECK(std::abs(group_delay(z, 1.0).time - 0.5) < 1e-9);
  try {
    larmor_time(z, 1.0, Channel::ref, default_omegas());
    FAIL("empty channel accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_channel);
  }
  CHECK_THROWS_AS(dwell_time(z, 1.0, Channel::ref), Error);
}

TEST_CASE("Larmor clock reads the dwell time in every channel") {
  const auto om = default_omegas();
  CHECK(om.size() == 5);
  CHECK(om.front() == 0.02);
  CHECK(om.back() == 0.02 / 16.0);
  for (const auto& spec : shapes()) {
    for (double e : grid20()) {
      for (Channel c : {Channel::full, Channel::tr, Channel::ref}) {
        const auto dec = decompose(spec, e);
        const double dw = dwell_time(dec, c, {spec.left_edge(), spec.right_edge()});
        const auto lr = larmor_time(spec, e, c, om);
        CAPTURE(e);
        CAPTURE(to_string(c));
        CHECK(std::abs(lr.time - dw) < 1e-6 * std::abs(dw));
        CHECK(lr.residual < kLarmorResidualLimit);
      }
    }
  }
}

TEST_CASE("halving the frequencies leaves the Larmor reading unchanged") {
  auto om = default_omegas();
  auto half = om;
  for (auto& w : half) {
    w *= 0.5;
  }
  for (double e : {0.3, 1.0, 3.0, 5.5}) {
    for (Channel c : {Channel::tr, Channel::ref}) {
      const double a = larmor_time(rect(), e, c, om).time;
      const double b = larmor_time(rect(), e, c, half).time;
      CHECK(std::abs(a - b) < 1e-4 * std::abs(a));
    }
  }
  const std::vector<double> two{0.02, 0.01};
  CHECK_THROWS_AS(larmor_time(rect(), 1.0, Channel::tr, two), Error);
}

TEST_CASE("weighted dwell identity closes only with the interference term") {
  for (const auto& spec : shapes()) {
    const DwellInterval iv{spec.left_edge(), spec.right_edge()};
    for (double e : grid20()) {
      const auto dec = decompose(spec, e);
      const double full = dwell_time(dec, Channel::full, iv);
      const double weighted = dec.T * dwell_time(dec, Channel::tr, iv) + dec.R * dwell_time(dec, Channel::ref, iv);
      const double inter = dwell_interference(dec, iv);
      CHECK(std::abs(full - weighted - inter) < 1e-10 * full);
    }
  }
  // At E = 1 on the reference barrier the interference term is not small.
  const auto dec = decompose(rect(), 1.0);
  CHECK(std::abs(dwell_interference(dec, {0.0, 1.0})) > 1e-2);
}

TEST_CASE("junction transmission") {
  const auto dec = decompose(rect(), 1.0);
  // Without a junction this is the ordinary barrier transmission.
  CHECK(std::abs(junction_transmission(rect(), 1.0, 0.0) - dec.t) < 1e-14);
  // With the frozen jump g0 = Re(C / psi(x_c)) psi_tr becomes the scattering
  // state, normalised by its incident amplitude.
  const double g0 = std::real(dec.scale / dec.full.evaluate(0.5));
  CHECK(std::abs(std::imag(dec.scale / dec.full.evaluate(0.5))) < 1e-12);
  CHECK(std::abs(junction_transmission(rect(), 1.0, g0) - dec.t / dec.a_tr_in) < 1e-12);
}

TEST_CASE("group delay") {
  const auto gd = group_delay(rect(), 1.0);
  CHECK(gd.residual < 1e-8);
  // Closed form d arg t / dE from the rectangular amplitude.
  auto phase = [](double e) {
    const double k = std::sqrt(e), q = std::sqrt(2.0 - e);
    const std::complex<double> den(std::cosh(q), (q * q - k * k) / (2.0 * k * q) * std::sinh(q));
    return -std::arg(den);  // arg t = -k d - arg den; -k d cancels with d/(2k)
  };
  const double h = 1e-5;
  const double exact = (phase(1.0 + h) - phase(1.0 - h)) / (2.0 * h);
  CHECK(std::abs(gd.time - exact) < 1e-7);
  CHECK(std::abs(gd.time - dwell_time(rect(), 1.0, Channel::full)) > 1e-2);

  double prev = 0.0;
  for (double d : {6.0, 8.0, 10.0}) {
    const auto s = PotentialSpec::make_rectangular(2.0, d, 0.0);
    const double tg = group_delay(s, 1.0).time;
    CHECK(std::abs(tg - 1.0) < 1e-4);  // 1 / (k kappa)
    if (prev != 0.0) {
      CHECK(std::abs(tg - prev) / prev < 0.05);
    }
    prev = tg;
  }
}
