#pragma once

// Scenario files: JSON validated against schema/scenario.schema.json, then
// mapped onto typed parameters with defaults filled in.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cscat/potential.hpp"

namespace cscat {

inline constexpr int kSchemaVersion = 1;

/// The published schema (compiled in from schema/scenario.schema.json).
const nlohmann::json& scenario_schema();

/// Validates `instance` against `schema` (draft-07 subset: type, const, enum,
/// properties, required, additionalProperties, items, min/maxItems,
/// minimum/maximum and their exclusive forms, oneOf, anyOf, not, local $ref).
/// Throws Error(schema_violation) naming the offending JSON pointer.
void validate_against_schema(const nlohmann::json& instance, const nlohmann::json& schema);

struct SpectrumParams {
  double k0 = 1.0;
  double sigma_k = 0.05;
  double x0 = -30.0;
  int n_k = 512;
  double cutoff = 8.0;
  double chirp = 0.0;
};

struct GridParams {
  double x_min = -250.0;
  double x_max = 250.0;
  double dx = 0.05;
  std::vector<double> times;
};

struct AmplitudesParams {
  double e_min = 0.1;
  double e_max = 6.0;
  int n_e = 200;
};

struct DecomposeParams {
  std::vector<double> energies{1.0};
  double x_min = 0.0;  // default: a - 5
  double x_max = 0.0;  // default: b + 5
  double dx = 0.01;
};

struct OracleParams {
  bool enabled = true;
  double t_end = 25.0;
  double compare_every = 5.0;
  double x_min = -150.0;
  double x_max = 150.0;
  double dx = 0.01;
  double dt = 0.002;
};

struct EvolveParams {
  double snapshot_dx = 0.5;
  bool quadrature_check = true;
  OracleParams oracle;
};

struct HartmanParams {
  bool enabled = true;
  double height = 2.0;
  double energy = 1.0;
  std::vector<double> widths{6.0, 8.0, 10.0};
};

struct TimesParams {
  std::vector<double> energies;
  std::vector<double> omegas;
  std::optional<std::pair<double, double>> dwell_interval;
  HartmanParams hartman;
};

struct ShapePairParams {
  bool enabled = true;
  double h_lo = 2.0;
  double h_hi = 30.0;
};

struct BohmParams {
  int ensemble = 64;
  double tol_x_rel = 1e-3;
  double sample_dt = 0.5;
  double margin = 2.0;
  double leak = 1e-4;
  double extend_factor = 3.0;
  std::optional<std::pair<double, double>> bracket;  // default x0 -+ 4 sigma_x
  ShapePairParams shape_pair;
};

struct Scenario {
  nlohmann::json document;  // as read, barrier_file resolved into "barrier"
  std::string description;
  PotentialSpec barrier = PotentialSpec::make_rectangular(2.0, 1.0, 0.0);
  SpectrumParams spectrum;
  GridParams grid;
  AmplitudesParams amplitudes;
  DecomposeParams decompose;
  EvolveParams evolve;
  TimesParams times;
  BohmParams bohm;
  bool deterministic = true;
  std::string output_dir;
  std::uint64_t hash = 0;

  std::string hash_hex() const;
};

/// Validates and maps a parsed document. Relative barrier_file paths are
/// resolved against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads, validates and maps a scenario file. Unreadable files raise
/// Error(io); malformed JSON and schema or range problems raise
/// Error(schema_violation).
Scenario load_scenario(const std::filesystem::path& path);

/// FNV-1a over bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace cscat
