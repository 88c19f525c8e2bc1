#pragma once

// Subcommands behind the command-line tool. Each returns a process exit
// code and writes its outputs under config.output_dir.

#include "membrane/config.hpp"
#include "membrane/diagnostics.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace membrane {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed_check = 1;
inline constexpr int config_error = 2;
inline constexpr int max_iter = 3;
inline constexpr int infeasible = 4;
inline constexpr int stall = 5;
}  // namespace exit_code

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class OutputFile {
 public:
  OutputFile(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.output_dir);
    path_ = (std::filesystem::path(c.output_dir) / name).string();
    os_.open(path_, std::ios::binary);
    if (!os_) throw Error(ErrorKind::IoError, "cannot open " + path_ + " for writing");
    os_ << "# config_hash " << config_hash(c) << '\n';
  }
  std::ofstream& stream() { return os_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
};

struct RunContext {
  Surface surface;
  TriMesh mesh;
};

inline RunContext build_context(const RunConfig& c) {
  return {c.surface.build(), build_mesh(c.domain)};
}

/// Nodal positions either from a deformed mesh file or from the placement map.
inline Configuration load_configuration(const RunConfig& c, const RunContext& ctx,
                                        const std::optional<std::string>& deformed) {
  if (!deformed) return initialize(ctx.surface, ctx.mesh, make_placement(c.boundary_map, ctx.surface, ctx.mesh),
                                   c.minimizer.J_floor);
  const ObjData d = read_obj(*deformed);
  if (d.positions.size() != ctx.mesh.vertex_count())
    throw Error(ErrorKind::IoError, *deformed + ": vertex count does not match the configured mesh");
  for (const auto& p : d.positions) ctx.surface.require_on_surface(p);
  return Configuration{d.positions};
}

// ---- verify -------------------------------------------------------------

inline int run_verify(const RunConfig& c, std::ostream& log = std::cout) {
  const auto reports = run_all_checks(c.model, c.verify);
  OutputFile rep(c, "verify_report.txt");
  OutputFile csv(c, "verify_summary.csv");
  csv.stream() << "check_name,samples,worst_violation,passed\n";
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.passed;
    auto& os = rep.stream();
    os << "[check " << r.name << "]\n"
       << "samples = " << r.samples << '\n'
       << "worst_violation = " << fmt(r.worst_violation) << '\n'
       << "tolerance = " << fmt(r.tolerance) << '\n'
       << "violations = " << r.violations << '\n'
       << "empirical_constant = " << fmt(r.empirical_constant) << '\n'
       << "seed = " << r.seed << '\n'
       << "passed = " << (r.passed ? "true" : "false") << '\n'
       << "witness = " << r.witness.dump() << "\n\n";
    csv.stream() << csv_field(r.name) << ',' << r.samples << ',' << fmt(r.worst_violation) << ','
                 << (r.passed ? "true" : "false") << '\n';
    log << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
  }
  const auto w = rank_one_counterexample(c.model, 1.0, 1.0, 0.1);
  rep.stream() << "[rank_one_counterexample]\n" << to_json(w).dump() << '\n';
  return all ? exit_code::ok : exit_code::failed_check;
}

// ---- minimize -----------------------------------------------------------

/// Random on-surface targets inside image triangles, at least `clearance`
/// from the boundary image.
inline std::vector<Vec3> random_target_points(const Surface& surface, const TriMesh& mesh,
                                              const Configuration& config, int count, std::uint64_t seed,
                                              double clearance) {
  std::vector<Vec3> out;
  auto rng = substream(seed, 0x7a76);
  const std::size_t nt = mesh.triangle_count();
  for (int attempt = 0; static_cast<int>(out.size()) < count && attempt < 1000 * count; ++attempt) {
    const std::size_t t = std::min(nt - 1, static_cast<std::size_t>(uniform01(rng) * nt));
    double a = uniform(rng, 0.05, 1.0), b = uniform(rng, 0.05, 1.0);
    if (a + b > 0.95) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    if (a < 0.05 || b < 0.05 || a + b > 0.95) continue;
    const auto& tri = mesh.triangles()[t];
    const Vec3 p = (1.0 - a - b) * config.positions[tri[0]] + a * config.positions[tri[1]] + b * config.positions[tri[2]];
    Vec3 y;
    try {
      y = surface.project(p);
    } catch (const Error&) {
      continue;
    }
    double d = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.boundary_edges())
      d = std::min(d, detail::point_segment_distance(y, config.positions[e[0]], config.positions[e[1]]));
    if (d >= clearance) out.push_back(y);
  }
  return out;
}

inline double mean_image_edge(const TriMesh& mesh, const Configuration& config) {
  double s = 0.0;
  for (const auto& tri : mesh.triangles())
    for (int i = 0; i < 3; ++i) s += (config.positions[tri[i]] - config.positions[tri[(i + 1) % 3]]).norm();
  return s / (3.0 * mesh.triangle_count());
}

struct DegreeSurvey {
  int points = 0;
  int agreeing = 0;
  int failures = 0;  // targets where either method threw
  std::vector<int> signed_counts;
};

inline DegreeSurvey degree_survey(const Surface& surface, const TriMesh& mesh, const Configuration& config,
                                  const std::vector<Vec3>& targets, const DegreeOptions& opt) {
  DegreeSurvey s;
  std::vector<std::optional<DegreeResult>> res(targets.size());
  parallel_for(
      targets.size(),
      [&](std::size_t i) {
        try {
          res[i] = brouwer_degree(surface, mesh, config, targets[i], opt);
        } catch (const Error&) {
        }
      },
      1);
  for (const auto& r : res) {
    ++s.points;
    if (!r) {
      ++s.failures;
      continue;
    }
    s.signed_counts.push_back(r->signed_count);
    if (r->methods_agree()) ++s.agreeing;
  }
  return s;
}

inline void write_energy_csv(const RunConfig& c, const MinimizeReport& rep) {
  OutputFile f(c, "energy_history.csv");
  f.stream() << "iteration,energy,grad_norm,min_J,step\n";
  for (const auto& r : rep.trace)
    f.stream() << r.iteration << ',' << fmt(r.energy) << ',' << fmt(r.grad_norm) << ',' << fmt(r.min_J) << ','
               << fmt(r.step) << '\n';
}

inline int run_minimize(const RunConfig& c, std::ostream& log = std::cout) {
  const RunContext ctx = build_context(c);
  Configuration start;
  try {
    start = initialize(ctx.surface, ctx.mesh, make_placement(c.boundary_map, ctx.surface, ctx.mesh), c.minimizer.J_floor);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InfeasibleStart && e.kind() != ErrorKind::OffSurface) throw;
    OutputFile s(c, "summary.txt");
    s.stream() << "status = infeasible_start\nmessage = " << e.what() << '\n';
    log << e.what() << '\n';
    return exit_code::infeasible;
  }
  const MinimizeResult res = minimize_from(c.model, ctx.surface, ctx.mesh, start, c.minimizer);
  const auto& rep = res.report;
  write_energy_csv(c, rep);
  {
    OutputFile obj(c, "deformed.obj");
    write_obj(obj.stream(), res.config.positions, ctx.mesh.triangles());
  }

  OutputFile sum(c, "summary.txt");
  auto& os = sum.stream();
  os << "status = " << to_string(rep.status) << '\n'
     << "iterations = " << rep.iterations << '\n'
     << "energy = " << fmt(rep.energy_history.empty() ? 0.0 : rep.energy_history.back()) << '\n'
     << "grad_norm = " << fmt(rep.final_grad_norm) << '\n'
     << "grad_tol = " << fmt(rep.grad_tol) << '\n'
     << "min_J = " << fmt(rep.min_element_J) << '\n'
     << "vertices = " << ctx.mesh.vertex_count() << '\n'
     << "triangles = " << ctx.mesh.triangle_count() << '\n'
     << "wall_time_s = " << fmt(rep.wall_time) << '\n';
  if (!rep.message.empty()) os << "message = " << rep.message << '\n';
  log << "minimize: " << to_string(rep.status) << " after " << rep.iterations << " iterations\n";

  if (rep.status == MinimizeStatus::converged) {
    if (c.diagnostics.injectivity) {
      const auto inj = injectivity_check(ctx.surface, ctx.mesh, res.config);
      os << "injectivity.pairs_tested = " << inj.pairs_tested << '\n'
         << "injectivity.overlapping_pairs = " << inj.overlapping_pairs << '\n'
         << "injectivity.overlap_area = " << fmt(inj.overlap_area) << '\n'
         << "injectivity.chart_failures = " << inj.chart_failures.size() << '\n'
         << "injectivity.injective_ae = " << (inj.injective_ae() ? "true" : "false") << '\n';
    }
    if (c.diagnostics.degree_points > 0) {
      const auto targets = random_target_points(ctx.surface, ctx.mesh, res.config, c.diagnostics.degree_points,
                                                c.seed, 4.0 * mean_image_edge(ctx.mesh, res.config));
      const auto s = degree_survey(ctx.surface, ctx.mesh, res.config, targets,
                                   {c.diagnostics.mollifier_radius, c.diagnostics.degree_margin, 3});
      int ones = 0;
      for (int d : s.signed_counts) ones += d == 1;
      os << "degree.points = " << s.points << '\n'
         << "degree.equal_to_one = " << ones << '\n'
         << "degree.methods_agree = " << s.agreeing << '\n'
         << "degree.failures = " << s.failures << '\n';
    }
    if (c.diagnostics.residual_fields > 0) {
      const auto rr = first_variation_residual(c.model, ctx.surface, ctx.mesh, res.config,
                                               c.diagnostics.residual_fields, c.seed);
      double worst = 0.0, gap = 0.0;
      for (const auto& r : rr) {
        worst = std::max(worst, r.normalized());
        gap = std::max(gap, std::abs(r.lagrangian_residual - r.eulerian_residual) / std::max(r.normalization, 1e-300));
      }
      os << "residual.fields = " << rr.size() << '\n'
         << "residual.max_normalized = " << fmt(worst) << '\n'
         << "residual.max_lagrangian_eulerian_gap = " << fmt(gap) << '\n';
    }
  }
  switch (rep.status) {
    case MinimizeStatus::converged: return exit_code::ok;
    case MinimizeStatus::max_iter: return exit_code::max_iter;
    case MinimizeStatus::infeasible_start: return exit_code::infeasible;
    case MinimizeStatus::line_search_stall: return exit_code::stall;
  }
  return exit_code::failed_check;
}

// ---- degree / residual ----------------------------------------------------

inline int run_degree(const RunConfig& c, const Vec3& point, const std::optional<std::string>& deformed,
                      std::ostream& log = std::cout) {
  const RunContext ctx = build_context(c);
  const Configuration config = load_configuration(c, ctx, deformed);
  const auto r = brouwer_degree(ctx.surface, ctx.mesh, config, point,
                                {c.diagnostics.mollifier_radius, c.diagnostics.degree_margin, 3});
  OutputFile f(c, "degree.csv");
  f.stream() << "x,y,z,signed_count,mollified_integral,mollified_degree,mollifier_radius\n"
             << fmt(point.x()) << ',' << fmt(point.y()) << ',' << fmt(point.z()) << ',' << r.signed_count << ','
             << fmt(r.mollified_integral) << ',' << r.mollified_degree() << ',' << fmt(r.mollifier_radius) << '\n';
  log << "degree " << r.signed_count << " (mollified " << fmt(r.mollified_integral) << ")\n";
  return r.methods_agree() ? exit_code::ok : exit_code::failed_check;
}

inline int run_residual(const RunConfig& c, const std::optional<std::string>& deformed, std::ostream& log = std::cout) {
  const RunContext ctx = build_context(c);
  const Configuration config = load_configuration(c, ctx, deformed);
  const auto rr = first_variation_residual(c.model, ctx.surface, ctx.mesh, config, c.diagnostics.residual_fields, c.seed);
  OutputFile f(c, "residual.csv");
  f.stream() << "test_field_id,lagrangian_residual,eulerian_residual,normalization,normalized,admissible\n";
  for (const auto& r : rr)
    f.stream() << r.test_field_id << ',' << fmt(r.lagrangian_residual) << ',' << fmt(r.eulerian_residual) << ','
               << fmt(r.normalization) << ',' << fmt(r.normalized()) << ',' << (r.admissible ? "true" : "false")
               << '\n';
  log << "residual: " << rr.size() << " test fields\n";
  return exit_code::ok;
}

}  // namespace membrane
