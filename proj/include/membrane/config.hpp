#pragma once

// Run configuration: a JSON document with one section per module. Parsing
// rejects unknown keys and validates every section before any work starts.

#include "membrane/minimizer.hpp"
#include "membrane/verification.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace membrane {

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::plane;
  Vec3 center = Vec3::Zero();  // plane origin, sphere/torus/ellipsoid centre
  Vec3 normal = Vec3::UnitZ();  // plane
  double radius = 1.0;          // sphere, torus major radius
  double minor_radius = 0.25;   // torus
  Vec3 semi_axes{1.0, 1.0, 1.0};  // ellipsoid
  std::array<double, 6> coeffs{};  // graph: z = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
  int orientation = 1;

  bool operator==(const SurfaceSpec&) const = default;

  Surface build() const {
    switch (kind) {
      case SurfaceKind::plane: return Surface::plane(center, normal, orientation);
      case SurfaceKind::sphere: return Surface::sphere(center, radius, orientation);
      case SurfaceKind::torus: return Surface::torus(center, radius, minor_radius, orientation);
      case SurfaceKind::ellipsoid: return Surface::ellipsoid(center, semi_axes, orientation);
      case SurfaceKind::graph: return Surface::graph(coeffs, orientation);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown surface kind");
  }
};

struct DiagnosticsOptions {
  bool injectivity = true;
  int degree_points = 100;
  double degree_margin = 1e-6;
  double mollifier_radius = 0.0;  // <= 0: three local edge lengths
  int residual_fields = 12;

  bool operator==(const DiagnosticsOptions&) const = default;
};

struct RunConfig {
  SurfaceSpec surface;
  IsotropicModel model;
  DomainSpec domain;
  BoundaryMapSpec boundary_map;
  MinimizeOptions minimizer;
  DiagnosticsOptions diagnostics;
  VerifyOptions verify;
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  bool operator==(const RunConfig& o) const {
    return surface == o.surface && model == o.model && domain.kind == o.domain.kind &&
           domain.resolution == o.domain.resolution && domain.radius == o.domain.radius &&
           domain.inner_radius == o.domain.inner_radius && domain.outer_radius == o.domain.outer_radius &&
           boundary_map == o.boundary_map && minimizer == o.minimizer && diagnostics == o.diagnostics &&
           verify.samples == o.verify.samples && verify.convexity_samples == o.verify.convexity_samples &&
           verify.lemma9_samples == o.verify.lemma9_samples && verify.lemma9_delta == o.verify.lemma9_delta &&
           output_dir == o.output_dir && seed == o.seed;
  }

  /// Checks every section against its module's invariants. Throws ConfigError.
  void validate() const {
    try {
      model.validate();
      minimizer.validate();
      (void)surface.build();
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
    if (!(domain.resolution > 0.0)) throw Error(ErrorKind::ConfigError, "domain.resolution must be positive");
    if (domain.kind == DomainKind::disk && !(domain.radius > 0.0))
      throw Error(ErrorKind::ConfigError, "domain.radius must be positive");
    if (domain.kind == DomainKind::annulus && !(domain.inner_radius > 0.0 && domain.outer_radius > domain.inner_radius))
      throw Error(ErrorKind::ConfigError, "domain needs 0 < inner_radius < outer_radius");
    if (diagnostics.degree_points < 0 || diagnostics.residual_fields < 0)
      throw Error(ErrorKind::ConfigError, "diagnostics counts must be >= 0");
    if (!(diagnostics.degree_margin > 0.0)) throw Error(ErrorKind::ConfigError, "degree_margin must be positive");
    if (verify.samples == 0 || verify.convexity_samples == 0 || verify.lemma9_samples == 0)
      throw Error(ErrorKind::ConfigError, "verify sample counts must be >= 1");
    if (!(verify.lemma9_delta > 0.0)) throw Error(ErrorKind::ConfigError, "verify.lemma9_delta must be positive");
  }
};

namespace detail {

using nlohmann::json;

template <typename E, std::size_t N>
E enum_from(const json& j, const std::string& key, const std::array<E, N>& values) {
  if (!j.is_string()) throw Error(ErrorKind::ConfigError, key + ": expected a string");
  const auto s = j.get<std::string>();
  for (E v : values)
    if (to_string(v) == s) return v;
  throw Error(ErrorKind::ConfigError, key + ": unknown value '" + s + "'");
}

// Reads fields of one JSON object, rejecting keys that were never read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::ConfigError, where() + "expected an object");
  }
  ~Section() = default;

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }

  template <typename T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw Error(ErrorKind::ConfigError, "expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw Error(ErrorKind::ConfigError, "expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw Error(ErrorKind::ConfigError, "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v.is_number_integer() && !v.is_number_unsigned()) throw Error(ErrorKind::ConfigError, "expected >= 0");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw Error(ErrorKind::ConfigError, "expected a string");
      }
      out = v.get<T>();
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, key(k) + ": " + strip(e.what()));
    }
  }

  template <int N>
  void get_vec(const std::string& k, Eigen::Matrix<double, N, 1>& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array() || v.size() != N) throw Error(ErrorKind::ConfigError, key(k) + ": expected " + std::to_string(N) + " numbers");
    for (int i = 0; i < N; ++i) {
      if (!v[i].is_number()) throw Error(ErrorKind::ConfigError, key(k) + ": expected numbers");
      out[i] = v[i].get<double>();
    }
  }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorKind::ConfigError, "unknown key '" + key(k) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }
  static std::string strip(const std::string& s) {
    const auto p = s.find(": ");
    return p == std::string::npos ? s : s.substr(p + 2);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  using detail::vec_json;
  json surface = {{"kind", to_string(c.surface.kind)}, {"orientation", c.surface.orientation}};
  switch (c.surface.kind) {
    case SurfaceKind::plane:
      surface["origin"] = vec_json(c.surface.center);
      surface["normal"] = vec_json(c.surface.normal);
      break;
    case SurfaceKind::sphere:
      surface["center"] = vec_json(c.surface.center);
      surface["radius"] = c.surface.radius;
      break;
    case SurfaceKind::torus:
      surface["center"] = vec_json(c.surface.center);
      surface["radius"] = c.surface.radius;
      surface["minor_radius"] = c.surface.minor_radius;
      break;
    case SurfaceKind::ellipsoid:
      surface["center"] = vec_json(c.surface.center);
      surface["semi_axes"] = vec_json(c.surface.semi_axes);
      break;
    case SurfaceKind::graph: surface["coeffs"] = c.surface.coeffs; break;
  }

  json ogden = json::array();
  for (const auto& t : c.model.ogden_terms) ogden.push_back({{"coefficient", t.coefficient}, {"exponent", t.exponent}});
  json model = {{"label", c.model.label},
                {"ogden", ogden},
                {"b", c.model.b},
                {"theta", {{"c", c.model.theta.c}, {"q", c.model.theta.q}, {"r", c.model.theta.r}}}};

  json domain = {{"kind", to_string(c.domain.kind)}, {"resolution", c.domain.resolution}};
  if (c.domain.kind == DomainKind::disk) domain["radius"] = c.domain.radius;
  if (c.domain.kind == DomainKind::annulus) {
    domain["inner_radius"] = c.domain.inner_radius;
    domain["outer_radius"] = c.domain.outer_radius;
  }

  json bmap = {{"kind", to_string(c.boundary_map.kind)}};
  switch (c.boundary_map.kind) {
    case BoundaryMapKind::identity: break;
    case BoundaryMapKind::affine:
      bmap["matrix"] = {vec_json(c.boundary_map.matrix.row(0).transpose()),
                        vec_json(c.boundary_map.matrix.row(1).transpose())};
      bmap["offset"] = vec_json(c.boundary_map.offset);
      break;
    case BoundaryMapKind::stereographic_cap: bmap["colatitude"] = c.boundary_map.colatitude; break;
    case BoundaryMapKind::torus_band:
      bmap["tube_angles"] = vec_json(c.boundary_map.tube_angles);
      bmap["axis_angles"] = vec_json(c.boundary_map.axis_angles);
      break;
  }

  const auto& m = c.minimizer;
  json minimizer = {{"max_iter", m.max_iter},       {"grad_tol", m.grad_tol},
                    {"armijo_c", m.armijo_c},       {"backtrack_ratio", m.backtrack_ratio},
                    {"initial_step", m.initial_step}, {"J_floor", m.J_floor}};
  const auto& d = c.diagnostics;
  json diagnostics = {{"injectivity", d.injectivity},
                      {"degree_points", d.degree_points},
                      {"degree_margin", d.degree_margin},
                      {"mollifier_radius", d.mollifier_radius},
                      {"residual_fields", d.residual_fields}};
  json verify = {{"samples", c.verify.samples},
                 {"convexity_samples", c.verify.convexity_samples},
                 {"lemma9_samples", c.verify.lemma9_samples},
                 {"lemma9_delta", c.verify.lemma9_delta}};
  return {{"surface", surface},         {"model", model},   {"domain", domain},
          {"boundary_map", bmap},       {"minimizer", minimizer}, {"diagnostics", diagnostics},
          {"verify", verify},           {"output_dir", c.output_dir}, {"seed", c.seed}};
}

/// Canonical text: sorted keys, shortest round-trip numbers.
inline std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

inline RunConfig from_json(const nlohmann::json& j) {
  using detail::Section;
  RunConfig c;
  Section top(j, "");
  if (top.has("surface")) {
    Section s(top.raw("surface"), "surface");
    if (s.has("kind"))
      c.surface.kind = detail::enum_from(s.raw("kind"), "surface.kind",
                                         std::array{SurfaceKind::plane, SurfaceKind::sphere, SurfaceKind::torus,
                                                    SurfaceKind::ellipsoid, SurfaceKind::graph});
    s.get("orientation", c.surface.orientation);
    s.get_vec("origin", c.surface.center);
    s.get_vec("center", c.surface.center);
    s.get_vec("normal", c.surface.normal);
    s.get("radius", c.surface.radius);
    s.get("minor_radius", c.surface.minor_radius);
    s.get_vec("semi_axes", c.surface.semi_axes);
    if (s.has("coeffs")) {
      Eigen::Matrix<double, 6, 1> v;
      s.get_vec("coeffs", v);
      for (int i = 0; i < 6; ++i) c.surface.coeffs[i] = v[i];
    }
    if (c.surface.orientation != 1 && c.surface.orientation != -1)
      throw Error(ErrorKind::ConfigError, "surface.orientation must be 1 or -1");
    s.finish();
  }
  if (top.has("model")) {
    Section s(top.raw("model"), "model");
    s.get("label", c.model.label);
    s.get("b", c.model.b);
    if (s.has("ogden")) {
      const auto& arr = s.raw("ogden");
      if (!arr.is_array()) throw Error(ErrorKind::ConfigError, "model.ogden: expected a list");
      c.model.ogden_terms.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Section t(arr[i], "model.ogden[" + std::to_string(i) + "]");
        OgdenTerm term;
        t.get("coefficient", term.coefficient);
        t.get("exponent", term.exponent);
        t.finish();
        c.model.ogden_terms.push_back(term);
      }
    }
    if (s.has("theta")) {
      Section t(s.raw("theta"), "model.theta");
      t.get("c", c.model.theta.c);
      t.get("q", c.model.theta.q);
      t.get("r", c.model.theta.r);
      t.finish();
    }
    s.finish();
  }
  if (top.has("domain")) {
    Section s(top.raw("domain"), "domain");
    if (s.has("kind"))
      c.domain.kind = detail::enum_from(s.raw("kind"), "domain.kind",
                                        std::array{DomainKind::unit_square, DomainKind::disk, DomainKind::annulus});
    s.get("resolution", c.domain.resolution);
    s.get("radius", c.domain.radius);
    s.get("inner_radius", c.domain.inner_radius);
    s.get("outer_radius", c.domain.outer_radius);
    s.finish();
  }
  if (top.has("boundary_map")) {
    Section s(top.raw("boundary_map"), "boundary_map");
    if (s.has("kind"))
      c.boundary_map.kind = detail::enum_from(s.raw("kind"), "boundary_map.kind",
                                              std::array{BoundaryMapKind::identity, BoundaryMapKind::affine,
                                                         BoundaryMapKind::stereographic_cap, BoundaryMapKind::torus_band});
    if (s.has("matrix")) {
      const auto& m = s.raw("matrix");
      if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 || !m[1].is_array() ||
          m[1].size() != 2)
        throw Error(ErrorKind::ConfigError, "boundary_map.matrix: expected [[a, b], [c, d]]");
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
          if (!m[i][k].is_number()) throw Error(ErrorKind::ConfigError, "boundary_map.matrix: expected numbers");
          c.boundary_map.matrix(i, k) = m[i][k].get<double>();
        }
    }
    s.get_vec("offset", c.boundary_map.offset);
    s.get("colatitude", c.boundary_map.colatitude);
    s.get_vec("tube_angles", c.boundary_map.tube_angles);
    s.get_vec("axis_angles", c.boundary_map.axis_angles);
    s.finish();
  }
  if (top.has("minimizer")) {
    Section s(top.raw("minimizer"), "minimizer");
    s.get("max_iter", c.minimizer.max_iter);
    s.get("grad_tol", c.minimizer.grad_tol);
    s.get("armijo_c", c.minimizer.armijo_c);
    s.get("backtrack_ratio", c.minimizer.backtrack_ratio);
    s.get("initial_step", c.minimizer.initial_step);
    s.get("J_floor", c.minimizer.J_floor);
    s.finish();
  }
  if (top.has("diagnostics")) {
    Section s(top.raw("diagnostics"), "diagnostics");
    s.get("injectivity", c.diagnostics.injectivity);
    s.get("degree_points", c.diagnostics.degree_points);
    s.get("degree_margin", c.diagnostics.degree_margin);
    s.get("mollifier_radius", c.diagnostics.mollifier_radius);
    s.get("residual_fields", c.diagnostics.residual_fields);
    s.finish();
  }
  if (top.has("verify")) {
    Section s(top.raw("verify"), "verify");
    s.get("samples", c.verify.samples);
    s.get("convexity_samples", c.verify.convexity_samples);
    s.get("lemma9_samples", c.verify.lemma9_samples);
    s.get("lemma9_delta", c.verify.lemma9_delta);
    s.finish();
  }
  top.get("output_dir", c.output_dir);
  top.get("seed", c.seed);
  top.finish();
  c.minimizer.seed = c.seed;
  c.verify.seed = c.seed;
  return c;
}

/// Parses config text. Syntax errors carry the line number; semantic errors
/// carry the key path. Throws ConfigError.
inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, "line " + std::to_string(detail::line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                                            ": " + e.what());
  }
  RunConfig c = from_json(j);
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace membrane
