#include <doctest.h>

#include <cmath>
#include <random>

#include "cscat/error.hpp"
#include "cscat/potential.hpp"

using namespace cscat;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("rectangular barrier") {
  const auto s = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  REQUIRE(s.segments().size() == 1);
  CHECK(s.segments()[0] == Segment{1.0, 2.0});
  CHECK(s.midpoint() == 0.5);
  CHECK(s.is_symmetric());
  CHECK_FALSE(s.is_zero_barrier());

  const auto z = PotentialSpec::make_rectangular(0.0, 1.0, -0.5);
  CHECK(z.is_zero_barrier());
  CHECK(z.midpoint() == 0.0);

  CHECK(kind_of([] { PotentialSpec::make_rectangular(2.0, -1.0, 0.0); }) == ErrorKind::invalid_geometry);
  CHECK(kind_of([] { PotentialSpec::make_rectangular(2.0, 0.0, 0.0); }) == ErrorKind::invalid_geometry);
}

TEST_CASE("symmetric composite mirrors the half list") {
  const std::vector<Segment> half{{0.5, 1.0}, {0.25, 3.0}};
  const auto s = PotentialSpec::make_symmetric_composite(half, 0.0);
  const std::vector<Segment> want{{0.5, 1.0}, {0.25, 3.0}, {0.25, 3.0}, {0.5, 1.0}};
  CHECK(s.segments() == want);
  CHECK(s.midpoint() == 0.75);
  CHECK(s.is_symmetric());
  // An interior edge sits exactly on x_c.
  CHECK(s.edges()[2] == s.midpoint());

  const std::vector<Segment> one{{1.0, 2.0}};
  const auto d = PotentialSpec::make_symmetric_composite(one, 0.0);
  CHECK(d.segments().size() == 2);
  CHECK(d.width() == 2.0);
  for (double x : {0.1, 0.7, 1.3, 1.9}) {
    CHECK(d(x) == PotentialSpec::make_rectangular(2.0, 2.0, 0.0)(x));
  }

  CHECK(kind_of([] { PotentialSpec::make_symmetric_composite({}, 0.0); }) == ErrorKind::invalid_geometry);
}

TEST_CASE("staircase sampling averages mirror pairs") {
  auto bump = [](double x) { return 3.0 * std::exp(-(x - 0.4) * (x - 0.4) * 8.0); };
  const auto two = PotentialSpec::sample_symmetric_function(bump, 2.0, 2, -1.0);
  REQUIRE(two.segments().size() == 2);
  CHECK(two.segments()[0].height == two.segments()[1].height);
  CHECK(two.is_symmetric());

  const auto flat = PotentialSpec::sample_symmetric_function([](double) { return 1.5; }, 1.0, 6, 0.0);
  CHECK(flat.is_symmetric());
  for (const auto& s : flat.segments()) {
    CHECK(s.height == 1.5);
  }
  const auto many = PotentialSpec::sample_symmetric_function(bump, 2.0, 40, -1.0);
  CHECK(many.is_symmetric());

  CHECK(kind_of([&] { PotentialSpec::sample_symmetric_function(bump, 1.0, 3, 0.0); }) == ErrorKind::invalid_geometry);
  const std::vector<double> odd{1.0, 2.0, 3.0};
  CHECK(kind_of([&] { PotentialSpec::sample_symmetric_function(odd, 1.0, 0.0); }) == ErrorKind::invalid_geometry);
}

TEST_CASE("lookup symmetry about the midpoint") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.05, 1.0), v(-1.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Segment> half;
    for (int j = 0; j < 1 + trial % 4; ++j) {
      half.push_back({w(rng), v(rng)});
    }
    const auto s = PotentialSpec::make_symmetric_composite(half, v(rng));
    CHECK(s.midpoint() == 0.5 * (s.left_edge() + s.right_edge()));
    const double hw = 0.5 * s.width();
    for (int i = 1; i <= 200; ++i) {
      const double delta = hw * i / 200.0;
      // Mirror points that land exactly on an edge pick opposite sides.
      bool on_edge = false;
      for (double e : s.edges()) {
        on_edge = on_edge || std::abs(s.midpoint() + delta - e) < 1e-12 || std::abs(s.midpoint() - delta - e) < 1e-12;
      }
      if (!on_edge) {
        CHECK(s(s.midpoint() + delta) == s(s.midpoint() - delta));
      }
    }
  }
}

TEST_CASE("asymmetric lists are representable but flagged") {
  const auto s = PotentialSpec::from_segments(0.0, {{0.5, 2.0}, {0.5, 1.0}});
  CHECK_FALSE(s.is_symmetric());
  CHECK(kind_of([] { PotentialSpec::from_segments(0.0, {}); }) == ErrorKind::invalid_geometry);
}

TEST_CASE("JSON round trip is bit exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(1e-3, 10.0), v(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Segment> half;
    for (int j = 0; j < 3; ++j) {
      half.push_back({w(rng), v(rng)});
    }
    const auto s = PotentialSpec::make_symmetric_composite(half, v(rng) / 7.0);
    const auto text = s.to_json().dump();
    const auto back = PotentialSpec::from_json(nlohmann::json::parse(text));
    CHECK(back == s);
    CHECK(back.to_json().dump() == text);
  }
  const auto j = nlohmann::json::parse(R"({"a": 0.1, "segments": [[0.3, 2.0000000000000004]]})");
  const auto s = PotentialSpec::from_json(j);
  CHECK(s.segments()[0].height == 2.0000000000000004);
  CHECK(s.to_json().dump() == R"({"a":0.1,"segments":[[0.3,2.0000000000000004]]})");

  CHECK(kind_of([] { PotentialSpec::from_json(nlohmann::json::parse(R"({"a": 0})")); }) == ErrorKind::invalid_geometry);
  CHECK(kind_of([] { PotentialSpec::from_json(nlohmann::json::parse(R"({"a": 0, "segments": [[1]]})")); }) ==
        ErrorKind::invalid_geometry);
  CHECK(kind_of([] { PotentialSpec::from_json(nlohmann::json::parse(R"({"a": 0, "segments": [[-1, 2]]})")); }) ==
        ErrorKind::invalid_geometry);
}

TEST_CASE("shifted moves heights only") {
  const auto s = PotentialSpec::make_rectangular(2.0, 1.0, 0.0).shifted(0.25);
  CHECK(s.segments()[0].height == 2.25);
  CHECK(s(-1.0) == 0.0);
  CHECK(s(2.0) == 0.0);
}
