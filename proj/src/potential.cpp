#include "cscat/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cscat/error.hpp"

namespace cscat {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_geometry: return "invalid geometry";
    case ErrorKind::asymmetric_potential: return "symmetric potential required";
    case ErrorKind::unsupported_energy: return "unsupported energy";
    case ErrorKind::opacity_overflow: return "opacity overflow";
    case ErrorKind::degenerate_odd_solution: return "degenerate odd solution";
    case ErrorKind::spectrum_domain: return "spectrum domain";
    case ErrorKind::stale_cache: return "stale cache";
    case ErrorKind::domain_too_small: return "domain too small";
    case ErrorKind::discretization: return "discretization";
    case ErrorKind::empty_channel: return "empty channel";
    case ErrorKind::extrapolation_failure: return "extrapolation failure";
    case ErrorKind::derivative_failure: return "derivative failure";
    case ErrorKind::node_proximity: return "node proximity";
    case ErrorKind::integration_failure: return "integration failure";
    case ErrorKind::bracket: return "bracket";
    case ErrorKind::schema_violation: return "schema violation";
    case ErrorKind::io: return "i/o";
  }
  return "unknown";
}

PotentialSpec::PotentialSpec(double left_edge, std::vector<Segment> segments)
    : a_(left_edge), segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw Error(ErrorKind::invalid_geometry, "barrier needs at least one segment");
  }
  if (!std::isfinite(a_)) {
    throw Error(ErrorKind::invalid_geometry, "left edge must be finite");
  }
  for (const auto& s : segments_) {
    if (!(s.width > 0.0) || !std::isfinite(s.width)) {
      throw Error(ErrorKind::invalid_geometry, "segment widths must be positive and finite");
    }
    if (!std::isfinite(s.height)) {
      throw Error(ErrorKind::invalid_geometry, "segment heights must be finite");
    }
  }
  edges_.reserve(segments_.size() + 1);
  edges_.push_back(a_);
  for (const auto& s : segments_) {
    edges_.push_back(edges_.back() + s.width);
  }
  b_ = edges_.back();
  xc_ = 0.5 * (a_ + b_);

  // Snap a boundary that lands within rounding of the midpoint onto it, so
  // even-count symmetric lists split exactly at x_c.
  const double snap = 8.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(a_), std::abs(b_)});
  for (std::size_t i = 1; i + 1 < edges_.size(); ++i) {
    if (std::abs(edges_[i] - xc_) <= snap) {
      edges_[i] = xc_;
    }
  }
}

PotentialSpec PotentialSpec::make_rectangular(double height, double width, double left_edge) {
  if (!(width > 0.0)) {
    throw Error(ErrorKind::invalid_geometry, "rectangular barrier width must be positive");
  }
  return PotentialSpec(left_edge, {Segment{width, height}});
}

PotentialSpec PotentialSpec::make_symmetric_composite(std::span<const Segment> half, double left_edge) {
  if (half.empty()) {
    throw Error(ErrorKind::invalid_geometry, "half-barrier list is empty");
  }
  std::vector<Segment> full(half.begin(), half.end());
  full.insert(full.end(), half.rbegin(), half.rend());
  return PotentialSpec(left_edge, std::move(full));
}

PotentialSpec PotentialSpec::sample_symmetric_function(std::span<const double> values,
                                                       double total_width, double left_edge) {
  const auto n = values.size();
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::invalid_geometry, "staircase sampling needs an even segment count >= 2");
  }
  if (!(total_width > 0.0)) {
    throw Error(ErrorKind::invalid_geometry, "sampled barrier width must be positive");
  }
  const double w = total_width / static_cast<double>(n);
  std::vector<Segment> segs(n);
  for (std::size_t j = 0; j < n; ++j) {
    segs[j] = Segment{w, 0.5 * (values[j] + values[n - 1 - j])};
  }
  return PotentialSpec(left_edge, std::move(segs));
}

PotentialSpec PotentialSpec::sample_symmetric_function(const std::function<double(double)>& f,
                                                       double total_width, int n, double left_edge) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::invalid_geometry, "staircase sampling needs an even segment count >= 2");
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  const double w = total_width / n;
  for (int j = 0; j < n; ++j) {
    values[static_cast<std::size_t>(j)] = f(left_edge + (j + 0.5) * w);
  }
  return sample_symmetric_function(values, total_width, left_edge);
}

PotentialSpec PotentialSpec::from_segments(double left_edge, std::vector<Segment> segments) {
  return PotentialSpec(left_edge, std::move(segments));
}

bool PotentialSpec::is_symmetric() const noexcept {
  return std::equal(segments_.begin(), segments_.end(), segments_.rbegin());
}

bool PotentialSpec::is_zero_barrier() const noexcept {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.height == 0.0; });
}

double PotentialSpec::operator()(double x) const noexcept {
  if (x < a_ || x >= b_) {
    return 0.0;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto idx = static_cast<std::size_t>(std::distance(edges_.begin(), it)) - 1;
  return segments_[std::min(idx, segments_.size() - 1)].height;
}

PotentialSpec PotentialSpec::shifted(double dv) const {
  auto segs = segments_;
  for (auto& s : segs) {
    s.height += dv;
  }
  return PotentialSpec(a_, std::move(segs));
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : segments_) {
    segs.push_back({s.width, s.height});
  }
  return {{"a", a_}, {"segments", segs}};
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("segments")) {
    throw Error(ErrorKind::invalid_geometry, "barrier JSON needs keys \"a\" and \"segments\"");
  }
  if (!j.at("a").is_number() || !j.at("segments").is_array()) {
    throw Error(ErrorKind::invalid_geometry, "barrier JSON has wrong value types");
  }
  std::vector<Segment> segs;
  for (const auto& item : j.at("segments")) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw Error(ErrorKind::invalid_geometry, "each segment must be [width, height]");
    }
    segs.push_back(Segment{item[0].get<double>(), item[1].get<double>()});
  }
  return PotentialSpec(j.at("a").get<double>(), std::move(segs));
}

}  // namespace cscat
