#include <doctest.h>

#include <cmath>
#include <vector>

#include "cscat/error.hpp"
#include "cscat/grid_evolver.hpp"

using namespace cscat;

namespace {

WavePacketField gaussian_field(double lo, double dx, std::size_t n, double k0, double sx, double x0) {
  WavePacketField f;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * dx;
    f.x.push_back(x);
    f.psi.push_back(free_gaussian(x, 0.0, k0, sx, x0));
  }
  return f;
}

}  // namespace

TEST_CASE("free Gaussian against the analytic solution") {
  const auto z = PotentialSpec::make_rectangular(0.0, 1.0, -0.5);
  const auto init = gaussian_field(-150.0, 0.02, 15001, 1.0, 10.0, -30.0);
  const auto out = grid_evolve_oracle(init, z, 0.0005, 20000, 1.5);
  std::vector<cplx> exact;
  for (double x : out.x) {
    exact.push_back(free_gaussian(x, 10.0, 1.0, 10.0, -30.0));
  }
  CHECK(out.t == doctest::Approx(10.0));
  const double l2 = l2_distance(out.psi, exact, 0.02);
  MESSAGE("free Gaussian L2 error at t = 10: " << l2);
  CHECK(l2 < 1e-6);
}

TEST_CASE("discrete norm is conserved across a barrier") {
  const auto s = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  const auto init = gaussian_field(-100.0, 0.02, 7001, 1.0, 5.0, -25.0);
  const GridEvolver ev(s, -100.0, 0.02, 7001, 0.002, 2.0);
  auto psi = init.psi;
  const double n0 = ev.norm(psi);
  CHECK(std::abs(n0 - 1.0) < 1e-4);  // M-weighted norm differs by O((k dx)^2)
  ev.advance(psi, 5000);
  CHECK(std::abs(ev.norm(psi) - n0) < 1e-12);
}

TEST_CASE("discretization budget") {
  const auto s = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  auto kind = [&](double dx, double dt, double kmax) {
    try {
      GridEvolver(s, -50.0, dx, 101, dt, kmax);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  CHECK(kind(0.5, 0.001, 1.5) == ErrorKind::discretization);
  CHECK(kind(0.02, 0.1, 1.5) == ErrorKind::discretization);
  CHECK(kind(0.02, 0.002, 1.5) == ErrorKind::io);

  WavePacketField uneven;
  uneven.x = {0.0, 0.1, 0.3};
  uneven.psi = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(grid_evolve_oracle(uneven, s, 0.001, 1, 1.0), Error);
}
