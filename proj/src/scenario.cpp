#include "cscat/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cscat/error.hpp"
#include "cscat/tunneling_times.hpp"

namespace cscat {

#include "scenario_schema.inc"

namespace {

using nlohmann::json;
using Issue = std::optional<std::string>;

std::string pointer_or_root(const std::string& p) { return p.empty() ? "/" : p; }

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

const char* type_name(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

bool has_type(const json& v, const std::string& t) {
  if (t == "number") return v.is_number();
  if (t == "integer") {
    return v.is_number_integer() || (v.is_number_float() && std::isfinite(v.get<double>()) &&
                                     v.get<double>() == std::floor(v.get<double>()));
  }
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "array") return v.is_array();
  if (t == "object") return v.is_object();
  if (t == "null") return v.is_null();
  return false;
}

const json& resolve_ref(const json& root, const std::string& ref) {
  if (ref.rfind("#", 0) != 0) {
    throw Error(ErrorKind::schema_violation, "only local $ref is supported: " + ref);
  }
  return root.at(json::json_pointer(ref.substr(1)));
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

Issue check(const json& v, const json& schema, const json& root, const std::string& ptr) {
  const auto here = pointer_or_root(ptr);
  if (schema.is_boolean()) {
    return schema.get<bool>() ? Issue{} : Issue{here + ": not allowed"};
  }
  if (schema.contains("$ref")) {
    return check(v, resolve_ref(root, schema["$ref"].get<std::string>()), root, ptr);
  }
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    std::string wanted;
    if (t.is_string()) {
      ok = has_type(v, t.get<std::string>());
      wanted = t.get<std::string>();
    } else {
      for (const auto& alt : t) {
        ok = ok || has_type(v, alt.get<std::string>());
        wanted += (wanted.empty() ? "" : " or ") + alt.get<std::string>();
      }
    }
    if (!ok) {
      return here + ": expected " + wanted + ", got " + type_name(v);
    }
  }
  if (schema.contains("const") && v != schema["const"]) {
    return here + ": must equal " + schema["const"].dump();
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) {
      found = found || v == e;
    }
    if (!found) {
      return here + ": must be one of " + schema["enum"].dump();
    }
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) {
      return here + ": must be >= " + fmt(schema["minimum"].get<double>());
    }
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) {
      return here + ": must be <= " + fmt(schema["maximum"].get<double>());
    }
    if (schema.contains("exclusiveMinimum") && !(x > schema["exclusiveMinimum"].get<double>())) {
      return here + ": must be > " + fmt(schema["exclusiveMinimum"].get<double>());
    }
    if (schema.contains("exclusiveMaximum") && !(x < schema["exclusiveMaximum"].get<double>())) {
      return here + ": must be < " + fmt(schema["exclusiveMaximum"].get<double>());
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) {
      return here + ": needs at least " + std::to_string(schema["minItems"].get<std::size_t>()) + " items";
    }
    if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>()) {
      return here + ": allows at most " + std::to_string(schema["maxItems"].get<std::size_t>()) + " items";
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (auto e = check(v[i], schema["items"], root, ptr + "/" + std::to_string(i))) {
          return e;
        }
      }
    }
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!v.contains(key.get<std::string>())) {
          return here + ": missing required key \"" + key.get<std::string>() + "\"";
        }
      }
    }
    const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (const auto& [key, value] : v.items()) {
      const auto child = ptr + "/" + escape_token(key);
      if (props && props->contains(key)) {
        if (auto e = check(value, (*props)[key], root, child)) {
          return e;
        }
      } else if (schema.contains("additionalProperties")) {
        const auto& ap = schema["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>()) {
          return child + ": unknown key";
        }
        if (ap.is_object()) {
          if (auto e = check(value, ap, root, child)) {
            return e;
          }
        }
      }
    }
  }
  if (schema.contains("not") && !check(v, schema["not"], root, ptr)) {
    return here + ": matches a forbidden form";
  }
  if (schema.contains("anyOf")) {
    bool any = false;
    for (const auto& alt : schema["anyOf"]) {
      any = any || !check(v, alt, root, ptr);
    }
    if (!any) {
      return here + ": matches none of the allowed forms";
    }
  }
  if (schema.contains("oneOf")) {
    int matches = 0;
    for (const auto& alt : schema["oneOf"]) {
      matches += check(v, alt, root, ptr) ? 0 : 1;
    }
    if (matches != 1) {
      std::string forms;
      for (const auto& alt : schema["oneOf"]) {
        if (alt.contains("required")) {
          forms += (forms.empty() ? "" : " | ") + alt["required"].dump();
        }
      }
      return here + ": must match exactly one of " + (forms.empty() ? std::string("the alternatives") : forms) +
             " (matched " + std::to_string(matches) + ")";
    }
  }
  return {};
}

[[noreturn]] void violation(const std::string& pointer, const std::string& what) {
  throw Error(ErrorKind::schema_violation, pointer + ": " + what);
}

template <class T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    out = obj.at(key).get<T>();
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

}  // namespace

const nlohmann::json& scenario_schema() {
  static const json schema = json::parse(kScenarioSchemaText);
  return schema;
}

void validate_against_schema(const nlohmann::json& instance, const nlohmann::json& schema) {
  if (auto e = check(instance, schema, schema, "")) {
    throw Error(ErrorKind::schema_violation, *e);
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string Scenario::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Scenario parse_scenario(const nlohmann::json& input, const std::filesystem::path& base_dir) {
  validate_against_schema(input, scenario_schema());

  Scenario sc;
  sc.document = input;
  if (input.contains("barrier_file")) {
    auto path = std::filesystem::path(input["barrier_file"].get<std::string>());
    if (path.is_relative()) {
      path = base_dir / path;
    }
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorKind::io, "cannot read barrier file " + path.string());
    }
    json barrier;
    try {
      barrier = json::parse(in);
    } catch (const json::exception& e) {
      violation("/barrier_file", std::string("malformed JSON: ") + e.what());
    }
    validate_against_schema(barrier, scenario_schema().at("definitions").at("barrier"));
    sc.document.erase("barrier_file");
    sc.document["barrier"] = barrier;
  }
  try {
    sc.barrier = PotentialSpec::from_json(sc.document["barrier"]);
  } catch (const Error& e) {
    violation("/barrier", e.what());
  }
  const double a = sc.barrier.left_edge();
  const double b = sc.barrier.right_edge();
  take(input, "description", sc.description);
  take(input, "deterministic", sc.deterministic);
  take(input, "output_dir", sc.output_dir);

  if (input.contains("spectrum")) {
    const auto& s = input["spectrum"];
    take(s, "k0", sc.spectrum.k0);
    take(s, "sigma_k", sc.spectrum.sigma_k);
    take(s, "x0", sc.spectrum.x0);
    take(s, "n_k", sc.spectrum.n_k);
    take(s, "cutoff", sc.spectrum.cutoff);
    take(s, "chirp", sc.spectrum.chirp);
  }
  if (!(sc.spectrum.k0 - sc.spectrum.cutoff * sc.spectrum.sigma_k > 0.0)) {
    violation("/spectrum", "k0 - cutoff * sigma_k must be positive (no negative-k leakage)");
  }
  if (!(sc.spectrum.x0 < a)) {
    violation("/spectrum/x0", "packet must start left of the barrier");
  }

  if (input.contains("grid")) {
    const auto& g = input["grid"];
    take(g, "x_min", sc.grid.x_min);
    take(g, "x_max", sc.grid.x_max);
    take(g, "dx", sc.grid.dx);
    take(g, "times", sc.grid.times);
  }
  if (sc.grid.times.empty()) {
    for (int i = 0; i <= 12; ++i) {
      sc.grid.times.push_back(5.0 * i);
    }
  }
  if (!(sc.grid.x_min < a) || !(sc.grid.x_max > b)) {
    violation("/grid", "x-domain must enclose the barrier");
  }

  if (input.contains("amplitudes")) {
    const auto& s = input["amplitudes"];
    take(s, "e_min", sc.amplitudes.e_min);
    take(s, "e_max", sc.amplitudes.e_max);
    take(s, "n_e", sc.amplitudes.n_e);
  }
  if (!(sc.amplitudes.e_max > sc.amplitudes.e_min)) {
    violation("/amplitudes", "e_max must exceed e_min");
  }

  sc.decompose.x_min = a - 5.0;
  sc.decompose.x_max = b + 5.0;
  if (input.contains("decompose")) {
    const auto& s = input["decompose"];
    take(s, "energies", sc.decompose.energies);
    take(s, "x_min", sc.decompose.x_min);
    take(s, "x_max", sc.decompose.x_max);
    take(s, "dx", sc.decompose.dx);
  }
  if (!(sc.decompose.x_max > sc.decompose.x_min)) {
    violation("/decompose", "x_max must exceed x_min");
  }

  if (input.contains("evolve")) {
    const auto& s = input["evolve"];
    take(s, "snapshot_dx", sc.evolve.snapshot_dx);
    take(s, "quadrature_check", sc.evolve.quadrature_check);
    if (s.contains("oracle")) {
      const auto& o = s["oracle"];
      auto& p = sc.evolve.oracle;
      take(o, "enabled", p.enabled);
      take(o, "t_end", p.t_end);
      take(o, "compare_every", p.compare_every);
      take(o, "x_min", p.x_min);
      take(o, "x_max", p.x_max);
      take(o, "dx", p.dx);
      take(o, "dt", p.dt);
    }
  }
  if (!(sc.evolve.oracle.x_min < a) || !(sc.evolve.oracle.x_max > b)) {
    violation("/evolve/oracle", "oracle domain must enclose the barrier");
  }

  sc.times.energies = linspace(0.1, 6.0, 20);
  sc.times.omegas = default_omegas();
  if (input.contains("times")) {
    const auto& s = input["times"];
    take(s, "energies", sc.times.energies);
    take(s, "omegas", sc.times.omegas);
    if (s.contains("dwell_interval")) {
      const auto iv = s["dwell_interval"].get<std::vector<double>>();
      if (!(iv[1] > iv[0])) {
        violation("/times/dwell_interval", "interval must be increasing");
      }
      sc.times.dwell_interval = std::make_pair(iv[0], iv[1]);
    }
    if (s.contains("hartman")) {
      const auto& h = s["hartman"];
      take(h, "enabled", sc.times.hartman.enabled);
      take(h, "height", sc.times.hartman.height);
      take(h, "energy", sc.times.hartman.energy);
      take(h, "widths", sc.times.hartman.widths);
    }
  }

  if (input.contains("bohm")) {
    const auto& s = input["bohm"];
    auto& p = sc.bohm;
    take(s, "ensemble", p.ensemble);
    take(s, "tol_x_rel", p.tol_x_rel);
    take(s, "sample_dt", p.sample_dt);
    take(s, "margin", p.margin);
    take(s, "leak", p.leak);
    take(s, "extend_factor", p.extend_factor);
    if (s.contains("bracket")) {
      const auto br = s["bracket"].get<std::vector<double>>();
      if (!(br[1] > br[0])) {
        violation("/bohm/bracket", "bracket must be increasing");
      }
      p.bracket = std::make_pair(br[0], br[1]);
    }
    if (s.contains("shape_pair")) {
      const auto& sp = s["shape_pair"];
      take(sp, "enabled", p.shape_pair.enabled);
      take(sp, "h_lo", p.shape_pair.h_lo);
      take(sp, "h_hi", p.shape_pair.h_hi);
    }
  }

  sc.hash = fnv1a64(sc.document.dump());
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot read scenario file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_violation, std::string("/: malformed JSON: ") + e.what());
  }
  return parse_scenario(doc, path.parent_path());
}

}  // namespace cscat
