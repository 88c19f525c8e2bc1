// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "membrane/membrane.hpp"
#include "oracles.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace membrane;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mat32 embed(const Mat2& A) {
  Mat32 F = Mat32::Zero();
  F.topRows<2>() = A;
  return F;
}

template <typename Map>
Configuration planar(const TriMesh& mesh, Map f) {
  Configuration c;
  for (const auto& x : mesh.vertices()) {
    const Vec2 y = f(x);
    c.positions.emplace_back(y.x(), y.y(), 0.0);
  }
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MEMBRANE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- criteria ----------------------------------------------------------------

Outcome rank_one() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const IsotropicModel m;
  const auto w = rank_one_counterexample(m, 1.0, 1.0, 0.1);
  const double Wp = oracle::cubic_model_energy(w.F_plus), Wm = oracle::cubic_model_energy(w.F_minus);
  const double gap = oracle::cubic_model_energy(w.F_bar) - 0.5 * (Wp + Wm);
  o.require(std::abs(w.W_plus - 4.0) <= 1e-12 && std::abs(w.W_minus - 4.0) <= 1e-12, "W+ or W- differs from 4");
  o.require(std::abs(Wp - 4.0) <= 1e-12 && std::abs(Wm - 4.0) <= 1e-12, "oracle W+ or W- differs from 4");
  o.require(w.gap > 1e4, "gap " + num(w.gap) + " <= 1e4");
  o.require(std::abs(w.gap - gap) <= 1e-9 * gap, "gap disagrees with oracle " + num(gap));
  o.require((w.F_plus - w.F_minus).jacobiSvd().singularValues()(1) <= 1e-14, "F+ - F- is not rank one");
  double prev = -1.0;
  for (double eps : {0.2, 0.1, 0.05, 0.01}) {
    const double g = rank_one_counterexample(m, 1.0, 1.0, eps).gap;
    o.require(g > prev, "gap not increasing at eps=" + num(eps));
    prev = g;
  }
  const double t = seconds_since(t0);
  o.require(t < 1.0, "runtime " + num(t) + " s");
  o.detail = o.pass ? "gap(0.1) = " + num(w.gap) + ", W+ = W- = 4, monotone in eps, " + num(t) + " s" : o.detail;
  return o;
}

Outcome h2_certificate() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto phi = check_midpoint_convexity(IsotropicModel{}, 100000, 42);
  const auto neg = check_negative_control(100000, 42);
  const double t = seconds_since(t0);
  o.require(phi.samples == 100000 && phi.violations == 0, num(double(phi.violations)) + " violations for Phi");
  o.require(neg.violations >= 1, "negative control found no violation");
  o.require(t < 30.0, "runtime " + num(t) + " s");
  if (o.pass)
    o.detail = "Phi: 0/100000 violations; (F.F)/J^2: " + std::to_string(neg.violations) + " violations, " + num(t) + " s";
  return o;
}

Outcome invariance() {
  Outcome o;
  const auto a = check_objectivity(IsotropicModel{}, 1000, 42);
  const auto b = check_isotropy(IsotropicModel{}, 1000, 42);
  o.require(a.worst_violation <= 1e-9, "objectivity deviation " + num(a.worst_violation));
  o.require(b.worst_violation <= 1e-9, "isotropy deviation " + num(b.worst_violation));
  if (o.pass) o.detail = "objectivity " + num(a.worst_violation) + ", isotropy " + num(b.worst_violation);
  return o;
}

Outcome stress() {
  Outcome o;
  const auto r = check_stress_consistency(IsotropicModel{}, 1000, 42, 1e-5, 1e-10);
  o.require(r.samples == 1000, "sample count");
  o.require(r.passed, "worst scaled violation " + num(r.worst_violation));
  if (o.pass) o.detail = "worst FD error / 1e-5 and Kirchhoff error / 1e-10: " + num(r.worst_violation);
  return o;
}

Outcome h4_lemma9() {
  Outcome o;
  const IsotropicModel m;
  const double K = h4_constant(m);
  o.require(std::abs(K - 20.0 * std::numbers::sqrt2 / 3.0) <= 1e-14, "K = " + num(K));
  const auto h4 = check_h4(m, 10000, 42);
  const auto l9 = check_lemma9(m, 0.01, 10000, 42);
  const double C = 2.0 * K / (1.0 - 2.0 * K * 0.01);
  o.require(h4.passed && h4.empirical_constant <= K, "H4 sup " + num(h4.empirical_constant));
  o.require(l9.samples == 10000 && l9.passed && l9.empirical_constant <= C, "perturbed bound sup " + num(l9.empirical_constant));
  if (o.pass)
    o.detail = "K = " + num(K) + ", sampled sup " + num(h4.empirical_constant) + "; C = " + num(C) + ", sampled sup " +
               num(l9.empirical_constant);
  return o;
}

Outcome affine_plane() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const IsotropicModel m;
  const Surface plane = Surface::plane();
  const TriMesh mesh = build_mesh({DomainKind::unit_square, 1.0 / 32});
  Mat2 A;
  A << 1.2, 0.0, 0.0, 0.9;
  const double target = mesh.area() * energy_density(m, embed(A));
  const auto f0 = make_placement({BoundaryMapKind::affine, A}, plane, mesh);
  MinimizeOptions opt;
  opt.max_iter = 20000;

  const auto r = minimize(m, plane, mesh, f0, opt);
  const double E = r.report.energy_history.back();
  o.require(r.report.status == MinimizeStatus::converged, "status " + std::string(to_string(r.report.status)));
  o.require(std::abs(E - target) <= 1e-6 * target, "energy " + num(E) + " vs " + num(target));
  double node_err = 0.0;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 y = A * mesh.vertices()[v];
    node_err = std::max(node_err, (r.config.positions[v] - Vec3(y.x(), y.y(), 0)).norm());
  }
  o.require(node_err <= 1e-6, "node deviation " + num(node_err));

  // Random restarts: interior nodes perturbed by up to a quarter of the mesh
  // size, redrawn until every element keeps J > J_floor.
  double best = std::numeric_limits<double>::infinity();
  bool monotone = true;
  int feasible = 0, draws = 0;
  for (std::uint64_t k = 0; feasible < 20 && draws < 200; ++k, ++draws) {
    Configuration start = initialize(plane, mesh, f0);
    auto rng = substream(1000 + k, 0);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
      if (!mesh.is_boundary(static_cast<int>(v)))
        start.positions[v] += (1.0 / 128) * Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 0);
    const auto rr = minimize_from(m, plane, mesh, start, opt);
    if (rr.report.status == MinimizeStatus::infeasible_start) continue;
    ++feasible;
    o.require(rr.report.status == MinimizeStatus::converged, "restart ended " + std::string(to_string(rr.report.status)));
    const auto& h = rr.report.energy_history;
    for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] <= h[i - 1];
    best = std::min(best, h.back());
  }
  o.require(feasible == 20, std::to_string(feasible) + " feasible restarts in " + std::to_string(draws) + " draws");
  o.require(monotone, "energy history increased");
  o.require(best >= target - 1e-10, "restart beat the affine energy: " + num(best - target));
  const double t = seconds_since(t0);
  o.require(t < 30.0, "runtime " + num(t) + " s");
  if (o.pass)
    o.detail = std::to_string(mesh.triangle_count()) + " triangles, E - |Omega|W(A) = " + num(E - target) +
               ", node error " + num(node_err) + ", best of 20 restarts exceeds it by " + num(best - target) + " (" +
               std::to_string(draws) + " draws), " + num(t) + " s";
  return o;
}

Outcome sphere_cap() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = load_config(std::string(MEMBRANE_CONFIG_DIR) + "/sphere_cap.json");
  o.require(c.domain.resolution == 0.05, "config resolution");
  const auto ctx = build_context(c);
  const auto r = minimize(c.model, ctx.surface, ctx.mesh, make_placement(c.boundary_map, ctx.surface, ctx.mesh),
                          c.minimizer);
  o.require(r.report.status == MinimizeStatus::converged, "status " + std::string(to_string(r.report.status)));
  double minJ = std::numeric_limits<double>::infinity();
  for (const auto& e : element_states(c.model, ctx.surface, ctx.mesh, r.config)) minJ = std::min(minJ, e.J);
  o.require(minJ > 1e-8, "min J " + num(minJ));

  const auto inj = injectivity_check(ctx.surface, ctx.mesh, r.config);
  o.require(inj.injective_ae() && inj.overlapping_pairs == 0,
            std::to_string(inj.overlapping_pairs) + " overlapping pairs");

  const auto targets = random_target_points(ctx.surface, ctx.mesh, r.config, 100, c.seed,
                                            4.0 * mean_image_edge(ctx.mesh, r.config));
  o.require(targets.size() == 100, "only " + std::to_string(targets.size()) + " target points");
  int ones = 0, agree = 0;
  for (const auto& y : targets) {
    const auto d = brouwer_degree(ctx.surface, ctx.mesh, r.config, y);
    ones += d.signed_count == 1;
    agree += d.methods_agree();
  }
  o.require(ones == static_cast<int>(targets.size()), std::to_string(ones) + " targets with degree 1");
  o.require(agree >= 99, std::to_string(agree) + "/100 method agreement");

  const auto res = first_variation_residual(c.model, ctx.surface, ctx.mesh, r.config, 12, c.seed);
  double worst = 0.0;
  for (const auto& x : res) worst = std::max(worst, x.normalized());
  o.require(res.size() == 12 && worst <= 10.0 * r.report.grad_tol, "residual " + num(worst));
  const double t = seconds_since(t0);
  o.require(t < 60.0, "runtime " + num(t) + " s");
  if (o.pass)
    o.detail = std::to_string(r.report.iterations) + " iterations, min J " + num(minJ) + ", 0 overlaps, degree 1 at " +
               std::to_string(ones) + "/100, agreement " + std::to_string(agree) + "/100, residual " + num(worst) +
               " <= " + num(10.0 * r.report.grad_tol) + ", " + num(t) + " s";
  return o;
}

Outcome degree_oracle() {
  Outcome o;
  const Surface plane = Surface::plane();
  const TriMesh disk = build_mesh({DomainKind::disk, 0.05, 1.0});
  DomainSpec ann{DomainKind::annulus, 0.05};
  ann.inner_radius = 0.5;
  ann.outer_radius = 1.0;
  const TriMesh annulus = build_mesh(ann);
  struct Case {
    const TriMesh* mesh;
    Configuration config;
    int expected;
    double r0, r1;
  };
  const std::vector<Case> cases = {
      {&disk, planar(disk, [](const Vec2& x) { return x; }), 1, 0.0, 0.85},
      {&disk, planar(disk, [](const Vec2& x) { return Vec2(x.x(), -x.y()); }), -1, 0.0, 0.85},
      {&annulus, planar(annulus, [](const Vec2& x) {
         const double r = x.norm(), t = 2.0 * std::atan2(x.y(), x.x());
         return Vec2(r * std::cos(t), r * std::sin(t));
       }), 2, 0.65, 0.85},
  };
  // Targets keep a clearance of at least the mollifier radius from the boundary image.
  const DegreeOptions opt{.mollifier_radius = 0.1};
  int tested = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& cs = cases[k];
    std::vector<std::pair<Vec2, Vec2>> edges;
    for (const auto& e : cs.mesh->boundary_edges())
      edges.emplace_back(cs.config.positions[e[0]].head<2>(), cs.config.positions[e[1]].head<2>());
    auto rng = substream(77, k);
    for (int i = 0; i < 50; ++i) {
      const double rho = std::sqrt(uniform(rng, cs.r0 * cs.r0, cs.r1 * cs.r1)), t = uniform(rng, 0, 2 * std::numbers::pi);
      const Vec2 p(rho * std::cos(t), rho * std::sin(t));
      const int w = oracle::winding_number(edges, p);
      const auto d = brouwer_degree(plane, *cs.mesh, cs.config, Vec3(p.x(), p.y(), 0), opt);
      o.require(w == cs.expected, "oracle gave " + std::to_string(w));
      o.require(d.signed_count == w && d.mollified_degree() == w,
                "mismatch at case " + std::to_string(cs.expected) + ": " + std::to_string(d.signed_count) + "/" +
                    num(d.mollified_integral) + " vs " + std::to_string(w));
      ++tested;
    }
  }
  if (o.pass) o.detail = std::to_string(tested) + " points over degrees -1, 1, 2 match the winding oracle";
  return o;
}

Outcome residual_identity() {
  Outcome o;
  const IsotropicModel m;
  std::vector<std::tuple<std::string, Surface, TriMesh, Configuration>> configs;
  {
    const Surface s = Surface::sphere(Vec3::Zero(), 1.0);
    const TriMesh mesh = build_mesh({DomainKind::disk, 0.1, 1.0});
    const auto f0 = make_placement({BoundaryMapKind::stereographic_cap}, s, mesh);
    configs.emplace_back("sphere cap start", s, mesh, initialize(s, mesh, f0));
    configs.emplace_back("sphere cap minimizer", s, mesh, minimize(m, s, mesh, f0, {}).config);
  }
  {
    const Surface s = Surface::torus(Vec3::Zero(), 1.0, 0.4);
    const TriMesh mesh = build_mesh({DomainKind::unit_square, 0.1});
    BoundaryMapSpec spec{BoundaryMapKind::torus_band};
    spec.tube_angles = {-1.0, 1.0};
    spec.axis_angles = {0.0, 1.2};
    configs.emplace_back("torus band start", s, mesh, initialize(s, mesh, make_placement(spec, s, mesh)));
  }
  {
    const Surface s = Surface::plane();
    const TriMesh mesh = build_mesh({DomainKind::disk, 0.1, 1.0});
    auto c = planar(mesh, [](const Vec2& x) { return Vec2(1.3 * x.x() + 0.2 * x.y(), 0.8 * x.y()); });
    auto rng = substream(5, 0);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
      if (!mesh.is_boundary(static_cast<int>(v))) c.positions[v] += 0.02 * Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 0);
    configs.emplace_back("perturbed plane", s, mesh, c);
  }
  {
    const Surface s = Surface::ellipsoid(Vec3::Zero(), Vec3(1.5, 1.0, 0.8));
    const TriMesh mesh = build_mesh({DomainKind::disk, 0.1, 0.5});
    Configuration c;
    for (const auto& x : mesh.vertices()) c.positions.push_back(s.project(Vec3(x.x(), x.y(), 1.0)));
    configs.emplace_back("ellipsoid patch", s, mesh, c);
  }
  double worst = 0.0;
  int fields = 0;
  for (const auto& [name, s, mesh, c] : configs)
    for (auto quad : {ResidualQuadrature::interpolated, ResidualQuadrature::pointwise})
      for (const auto& r : first_variation_residual(m, s, mesh, c, 12, 9, quad)) {
        const double rel =
            std::abs(r.lagrangian_residual - r.eulerian_residual) / std::max(1.0, std::abs(r.lagrangian_residual));
        worst = std::max(worst, rel);
        ++fields;
        o.require(rel <= 1e-10, name + ": " + num(rel));
      }
  if (o.pass)
    o.detail = std::to_string(fields) + " fields on " + std::to_string(configs.size()) + " configurations, worst " +
               num(worst);
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "membrane_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  struct Run {
    std::string file, command;
    std::vector<std::string> outputs;
  };
  const std::vector<Run> runs = {
      {"verify_default.json", "verify", {"verify_summary.csv"}},
      {"sphere_cap.json", "minimize", {"energy_history.csv"}},
      {"torus_band.json", "residual", {"residual.csv"}},
  };
  int compared = 0;
  for (const auto& run : runs) {
    auto j = nlohmann::json::parse(slurp(fs::path(MEMBRANE_CONFIG_DIR) / run.file));
    j["output_dir"] = (root / "out").string();
    const fs::path cfg = root / run.file;
    std::ofstream(cfg) << j.dump(2);
    std::vector<std::string> first;
    for (const char* threads : {"1", "4"}) {
      const int code = run_cli(std::string("--threads ") + threads + " " + run.command + " " + cfg.string());
      o.require(code == exit_code::ok, run.command + " exited " + std::to_string(code));
      std::vector<std::string> now;
      for (const auto& f : run.outputs) now.push_back(slurp(root / "out" / f));
      if (first.empty()) {
        first = now;
        continue;
      }
      for (std::size_t k = 0; k < now.size(); ++k) {
        o.require(!now[k].empty(), run.outputs[k] + " is empty");
        o.require(now[k] == first[k], run.outputs[k] + " differs between runs");
        ++compared;
      }
    }
  }
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(compared) + " CSVs bitwise identical across repeated runs (1 and 4 threads)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"rank-one convexity failure", rank_one},
      {"midpoint convexity certificate", h2_certificate},
      {"objectivity and isotropy", invariance},
      {"stress consistency", stress},
      {"growth bound and perturbed-argument constant", h4_lemma9},
      {"affine Dirichlet minimization", affine_plane},
      {"sphere-cap run", sphere_cap},
      {"degree oracle equivalence", degree_oracle},
      {"Lagrangian/Eulerian residual identity", residual_identity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
