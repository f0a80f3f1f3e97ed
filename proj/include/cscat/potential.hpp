#pragma once

// Symmetric piecewise-constant barriers.
//
// Units throughout the library: hbar = 1, m = 1/2, so E = k^2, the free
// group velocity is 2k and a unit plane wave e^{ikx} carries current 2k.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cscat {

struct Segment {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// A barrier V(x) made of constant segments on [a, b], zero outside.
///
/// The named constructors build mirror-symmetric lists by construction.
/// `from_segments` accepts any list of positive-width segments so that
/// asymmetric inputs can be represented and rejected downstream; query
/// `is_symmetric()` before relying on the midpoint construction.
class PotentialSpec {
 public:
  static PotentialSpec make_rectangular(double height, double width, double left_edge);
  static PotentialSpec make_symmetric_composite(std::span<const Segment> half, double left_edge);
  static PotentialSpec sample_symmetric_function(std::span<const double> midpoint_values,
                                                 double total_width, double left_edge);
  static PotentialSpec sample_symmetric_function(const std::function<double(double)>& f,
                                                 double total_width, int n, double left_edge);
  static PotentialSpec from_segments(double left_edge, std::vector<Segment> segments);

  double left_edge() const noexcept { return a_; }
  double right_edge() const noexcept { return b_; }
  double midpoint() const noexcept { return xc_; }
  double width() const noexcept { return b_ - a_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// Segment boundaries x_0 = a < x_1 < ... < x_n = b.
  const std::vector<double>& edges() const noexcept { return edges_; }

  bool is_symmetric() const noexcept;
  bool is_zero_barrier() const noexcept;

  /// V(x); at an interior boundary the segment to the right wins.
  double operator()(double x) const noexcept;

  /// Same geometry with every segment height shifted by `dv`.
  PotentialSpec shifted(double dv) const;

  nlohmann::json to_json() const;
  static PotentialSpec from_json(const nlohmann::json& j);

  friend bool operator==(const PotentialSpec& lhs, const PotentialSpec& rhs) {
    return lhs.a_ == rhs.a_ && lhs.segments_ == rhs.segments_;
  }

 private:
  PotentialSpec(double left_edge, std::vector<Segment> segments);

  double a_ = 0.0;
  double b_ = 0.0;
  double xc_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<double> edges_;
};

}  // namespace cscat
