#pragma once

// Sampled certificates for the constitutive hypotheses: objectivity,
// isotropy, joint convexity of Phi(F, J), stress consistency, the stress
// growth bound and its perturbed form, coercivity, and the rank-one
// convexity counterexample.

#include "membrane/constitutive.hpp"
#include "membrane/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace membrane {

/// Outcome of one sampled check. passed <=> worst_violation <= tolerance.
struct CheckReport {
  std::string name;
  std::size_t samples = 0;
  double worst_violation = 0.0;
  nlohmann::json witness = nlohmann::json::object();
  double empirical_constant = 0.0;
  double tolerance = 0.0;
  std::size_t violations = 0;
  bool passed = false;
  std::uint64_t seed = 0;

  bool operator==(const CheckReport&) const = default;
};

namespace detail {

// JSON has no infinities; they travel as strings.
inline nlohmann::json encode_double(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double decode_double(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const CheckReport& r) {
  j = {{"name", r.name},
       {"samples", r.samples},
       {"worst_violation", detail::encode_double(r.worst_violation)},
       {"witness", r.witness},
       {"empirical_constant", r.empirical_constant},
       {"tolerance", r.tolerance},
       {"violations", r.violations},
       {"passed", r.passed},
       {"seed", r.seed}};
}

inline void from_json(const nlohmann::json& j, CheckReport& r) {
  j.at("name").get_to(r.name);
  j.at("samples").get_to(r.samples);
  r.worst_violation = detail::decode_double(j.at("worst_violation"));
  r.witness = j.at("witness");
  j.at("empirical_constant").get_to(r.empirical_constant);
  j.at("tolerance").get_to(r.tolerance);
  j.at("violations").get_to(r.violations);
  j.at("passed").get_to(r.passed);
  j.at("seed").get_to(r.seed);
}

namespace detail {

inline nlohmann::json to_json_matrix(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

inline constexpr std::size_t kChunk = 1024;

// Runs sample(i, rng) for i in [0, n); sample i draws from the substream of
// its chunk, so results do not depend on the worker count.
template <typename Sample>
void sample_chunks(std::size_t n, std::uint64_t seed, Sample&& sample) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        auto rng = substream(seed, c);
        const std::size_t hi = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < hi; ++i) sample(i, rng);
      },
      1);
}

// Index of the largest value; ties resolve to the lowest index.
inline std::size_t argmax(const std::vector<double>& v) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[k]) k = i;
  return k;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  Mat3 G;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) G(i, k) = gaussian(rng);
  Eigen::HouseholderQR<Mat3> qr(G);
  Mat3 Q = qr.householderQ();
  const Mat3 R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 3; ++k)
    if (R(k, k) < 0.0) Q.col(k) *= -1.0;
  if (Q.determinant() < 0.0) Q.col(0) *= -1.0;
  return Q;
}

inline Mat2 rotation2(double angle) {
  Mat2 R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return R;
}

/// F = U diag(l1, l2) V^T with U a random 3x2 orthonormal frame.
inline Mat32 compose(std::mt19937_64& rng, double l1, double l2) {
  const Mat3 Q = random_rotation(rng);
  const Mat2 V = rotation2(uniform(rng, 0.0, 2.0 * std::numbers::pi));
  return Q.leftCols<2>() * Eigen::Vector2d(l1, l2).asDiagonal() * V.transpose();
}

inline Mat32 random_stretch_matrix(std::mt19937_64& rng, double lo, double hi) {
  const double l1 = log_uniform(rng, lo, hi);
  const double l2 = log_uniform(rng, lo, hi);
  return compose(rng, l1, l2);
}

inline CheckReport finish(CheckReport r, const std::vector<double>& violation, nlohmann::json witness) {
  r.samples = violation.size();
  for (double v : violation)
    if (v > r.tolerance) ++r.violations;
  if (!violation.empty()) r.worst_violation = violation[argmax(violation)];
  r.witness = std::move(witness);
  r.passed = r.worst_violation <= r.tolerance;
  return r;
}

}  // namespace detail

/// max |W(QF) - W(F)| / max(|W(F)|, 1) over random rotations Q.
inline CheckReport check_objectivity(const IsotropicModel& model, std::size_t n, std::uint64_t seed,
                                     double tolerance = 1e-9) {
  std::vector<double> dev(n);
  std::vector<Mat32> Fs(n);
  std::vector<Mat3> Qs(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    Fs[i] = detail::random_stretch_matrix(rng, 0.05, 20.0);
    Qs[i] = detail::random_rotation(rng);
    const double w = energy_density(model, Fs[i]);
    dev[i] = std::abs(energy_density(model, Qs[i] * Fs[i]) - w) / std::max(std::abs(w), 1.0);
  });
  CheckReport r{.name = "objectivity", .tolerance = tolerance, .seed = seed};
  nlohmann::json w;
  if (n > 0) {
    const auto k = detail::argmax(dev);
    w = {{"F", detail::to_json_matrix(Fs[k])}, {"Q", detail::to_json_matrix(Qs[k])}};
  }
  return detail::finish(std::move(r), dev, std::move(w));
}

/// max |W(FR) - W(F)| / max(|W(F)|, 1) over random R in O(2).
inline CheckReport check_isotropy(const IsotropicModel& model, std::size_t n, std::uint64_t seed,
                                  double tolerance = 1e-9) {
  std::vector<double> dev(n);
  std::vector<Mat32> Fs(n);
  std::vector<Mat2> Rs(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    Fs[i] = detail::random_stretch_matrix(rng, 0.05, 20.0);
    Rs[i] = detail::rotation2(uniform(rng, 0.0, 2.0 * std::numbers::pi));
    if (uniform01(rng) < 0.5) Rs[i].col(1) *= -1.0;
    const double w = energy_density(model, Fs[i]);
    dev[i] = std::abs(energy_density(model, Fs[i] * Rs[i]) - w) / std::max(std::abs(w), 1.0);
  });
  CheckReport r{.name = "isotropy", .tolerance = tolerance, .seed = seed};
  nlohmann::json w;
  if (n > 0) {
    const auto k = detail::argmax(dev);
    w = {{"F", detail::to_json_matrix(Fs[k])}, {"R", detail::to_json_matrix(Rs[k])}};
  }
  return detail::finish(std::move(r), dev, std::move(w));
}

using SplitEnergy = std::function<double(const Mat32&, double)>;

namespace detail {

struct ConvexitySample {
  Mat32 F1, F2;
  double J1, J2, weight;
  double lhs, rhs;
  double excess;  // (lhs - rhs) / (1 + Phi1 + Phi2)
};

inline std::vector<ConvexitySample> convexity_samples(const SplitEnergy& phi, std::size_t n, std::uint64_t seed) {
  constexpr int kWeights = 10;
  std::vector<ConvexitySample> out(n);
  sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    auto draw = [&](Mat32& F, double& J) {
      // |F| <= sqrt(2) * 7 < 10
      F = random_stretch_matrix(rng, 1e-3, 7.0);
      J = log_uniform(rng, 0.05, 20.0);
    };
    ConvexitySample s;
    draw(s.F1, s.J1);
    draw(s.F2, s.J2);
    const double p1 = phi(s.F1, s.J1), p2 = phi(s.F2, s.J2);
    const double scale = 1.0 + std::abs(p1) + std::abs(p2);
    s.excess = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kWeights; ++k) {
      const double w = k == 0 ? 0.5 : uniform01(rng);
      const double lhs = phi(w * s.F1 + (1.0 - w) * s.F2, w * s.J1 + (1.0 - w) * s.J2);
      const double rhs = w * p1 + (1.0 - w) * p2;
      const double e = (lhs - rhs) / scale;
      if (e > s.excess) {
        s.excess = e;
        s.weight = w;
        s.lhs = lhs;
        s.rhs = rhs;
      }
    }
    out[i] = s;
  });
  return out;
}

inline nlohmann::json convexity_witness(const ConvexitySample& s) {
  return {{"F1", to_json_matrix(s.F1)}, {"J1", s.J1},   {"F2", to_json_matrix(s.F2)}, {"J2", s.J2},
          {"weight", s.weight},         {"lhs", s.lhs}, {"rhs", s.rhs}};
}

}  // namespace detail

/// Jensen inequality for Phi over random pairs with J in [0.05, 20] and
/// |F| <= 10, at the midpoint and 10 random weights per pair. The violation
/// is (Phi(mix) - mix(Phi)) / (1 + |Phi1| + |Phi2|).
inline CheckReport check_midpoint_convexity(const SplitEnergy& phi, std::size_t n, std::uint64_t seed,
                                            std::string name = "h2_convexity", double tolerance = 1e-10) {
  const auto s = detail::convexity_samples(phi, n, seed);
  std::vector<double> ex(n);
  for (std::size_t i = 0; i < n; ++i) ex[i] = s[i].excess;
  CheckReport r{.name = std::move(name), .tolerance = tolerance, .seed = seed};
  nlohmann::json w;
  if (n > 0) w = detail::convexity_witness(s[detail::argmax(ex)]);
  return detail::finish(std::move(r), ex, std::move(w));
}

inline CheckReport check_midpoint_convexity(const IsotropicModel& model, std::size_t n, std::uint64_t seed) {
  return check_midpoint_convexity([&](const Mat32& F, double J) { return phi_split(model, F, J); }, n, seed);
}

/// Searches for a convexity violation of (F.F)/J^2. Passes when one is found:
/// worst_violation = max(0, tolerance - largest excess), so it is 0 exactly
/// when some excess exceeds the tolerance.
inline CheckReport check_negative_control(std::size_t n, std::uint64_t seed, double tolerance = 1e-10) {
  const SplitEnergy phi = [](const Mat32& F, double J) { return F.squaredNorm() / (J * J); };
  const auto s = detail::convexity_samples(phi, n, seed);
  std::vector<double> ex(n);
  for (std::size_t i = 0; i < n; ++i) ex[i] = s[i].excess;
  CheckReport r{.name = "h2_negative_control", .samples = n, .tolerance = 0.0, .seed = seed};
  if (n == 0) {
    r.worst_violation = std::numeric_limits<double>::infinity();
    return r;
  }
  const auto k = detail::argmax(ex);
  for (double e : ex)
    if (e > tolerance) ++r.violations;
  r.worst_violation = ex[k] > tolerance ? 0.0 : tolerance - ex[k];
  r.empirical_constant = ex[k];
  r.witness = detail::convexity_witness(s[k]);
  r.passed = r.worst_violation <= r.tolerance;
  return r;
}

/// Central differences of W against the spectral PK1 formula, plus the
/// Kirchhoff relation sigma = S F^T. Stretches are log-uniform in [0.05, 10]
/// and the difference step is 1e-5 times the smaller stretch.
inline CheckReport check_stress_consistency(const IsotropicModel& model, std::size_t n, std::uint64_t seed,
                                            double tolerance = 1e-5, double kirchhoff_tolerance = 1e-10) {
  std::vector<double> fd(n), kr(n);
  std::vector<Mat32> Fs(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    const Mat32 F = detail::random_stretch_matrix(rng, 0.05, 10.0);
    Fs[i] = F;
    const StressState st = pk1_stress(model, F);
    // Truncation error scales with (h / lambda_min)^2.
    const double h = 1e-5 * stretches(F).lambda2;
    Mat32 num;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 2; ++b) {
        Mat32 Fp = F, Fm = F;
        Fp(a, b) += h;
        Fm(a, b) -= h;
        num(a, b) = (energy_density(model, Fp) - energy_density(model, Fm)) / (2.0 * h);
      }
    fd[i] = (num - st.pk1).norm() / std::max(st.pk1.norm(), 1.0);
    kr[i] = (st.kirchhoff - st.pk1 * F.transpose()).norm() / std::max(st.kirchhoff.norm(), 1.0);
  });
  // Both errors share one violation measure, each scaled to its tolerance.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::max(fd[i] / tolerance, kr[i] / kirchhoff_tolerance);
  CheckReport r{.name = "stress_consistency", .tolerance = 1.0, .seed = seed};
  nlohmann::json w;
  if (n > 0) {
    const auto k = detail::argmax(v);
    w = {{"F", detail::to_json_matrix(Fs[k])}, {"fd_relative_error", fd[k]}, {"kirchhoff_relative_error", kr[k]}};
    r.empirical_constant = fd[detail::argmax(fd)];
  }
  return detail::finish(std::move(r), v, std::move(w));
}

/// Analytic constant K with |(l1 Phi_,1, l2 Phi_,2)| <= K (Phi + 1) for all
/// stretches. With m = max(q, r) and Upsilon, S, Theta the three energy terms:
///   |ogden part| <= gamma_max Upsilon,  |shear part| <= sqrt2 S,
///   |volumetric part| <= sqrt2 m (Theta + 2c),
/// so |tau| <= M Phi + B with M = max(gamma_max, sqrt2, sqrt2 m), B = 2 sqrt2 m c.
/// (M Phi + B)/(Phi + 1) is monotone in Phi and Phi >= 2b, giving
///   K = max(M, (2b M + B)/(2b + 1)).
inline double h4_constant(const IsotropicModel& model) {
  const double m = std::max(model.theta.q, model.theta.r);
  const double M = std::max({model.growth_exponent(), std::numbers::sqrt2, std::numbers::sqrt2 * m});
  const double B = 2.0 * std::numbers::sqrt2 * m * model.theta.c;
  return std::max(M, (2.0 * model.b * M + B) / (2.0 * model.b + 1.0));
}

/// |(l1 Phi_,1, l2 Phi_,2)| / (Phi + 1).
inline double h4_ratio(const IsotropicModel& model, double l1, double l2) {
  return kirchhoff_principal(model, l1, l2).norm() / (energy_from_stretches(model, l1, l2) + 1.0);
}

/// Samples stretches log-uniform in [1e-3, 1e3]^2. The violation is
/// ratio - K, and empirical_constant records the sampled sup of the ratio.
inline CheckReport check_h4(const IsotropicModel& model, std::size_t n, std::uint64_t seed) {
  const double K = h4_constant(model);
  std::vector<double> ratio(n);
  std::vector<Vec2> lam(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    lam[i] = Vec2(log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3));
    ratio[i] = h4_ratio(model, lam[i].x(), lam[i].y());
  });
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = ratio[i] - K;
  CheckReport r{.name = "h4", .tolerance = 0.0, .seed = seed};
  nlohmann::json w = {{"K", K}};
  if (n > 0) {
    const auto k = detail::argmax(ratio);
    r.empirical_constant = ratio[k];
    w["lambda1"] = lam[k].x();
    w["lambda2"] = lam[k].y();
  }
  return detail::finish(std::move(r), v, std::move(w));
}

/// |W_F(TA) A^T| <= C (W(A) + 1) with C = 2K/(1 - 2K delta), for A with
/// stretches log-uniform in [1e-3, 1e3] and T = 1 + E on range(A), |E| < delta.
/// Every tenth sample pins the smaller stretch at 1e-3.
inline CheckReport check_lemma9(const IsotropicModel& model, double delta, std::size_t n, std::uint64_t seed) {
  const double K = h4_constant(model);
  if (!(delta > 0.0) || !(delta < 1.0 / (2.0 * K)))
    throw Error(ErrorKind::DeltaTooLarge, "delta must lie in (0, 1/(2K)) with K = " + std::to_string(K));
  const double C = 2.0 * K / (1.0 - 2.0 * K * delta);
  std::vector<double> ratio(n);
  std::vector<Mat32> As(n);
  std::vector<Mat3> Ts(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    const double l1 = log_uniform(rng, 1e-3, 1e3);
    const double l2 = i % 10 == 0 ? 1e-3 : log_uniform(rng, 1e-3, 1e3);
    const Mat3 Q = detail::random_rotation(rng);
    const Mat2 V = detail::rotation2(uniform(rng, 0.0, 2.0 * std::numbers::pi));
    const Eigen::Matrix<double, 3, 2> U = Q.leftCols<2>();
    const Mat32 A = U * Vec2(l1, l2).asDiagonal() * V.transpose();
    Mat2 e;
    e << gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng);
    e *= delta * uniform01(rng) * (1.0 - 1e-12) / e.norm();
    const Mat3 T = Mat3::Identity() + U * e * U.transpose();
    const Mat32 TA = T * A;
    As[i] = A;
    Ts[i] = T;
    ratio[i] = (pk1_stress(model, TA).pk1 * A.transpose()).norm() / (energy_density(model, A) + 1.0);
  });
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = ratio[i] - C;
  CheckReport r{.name = "lemma9", .tolerance = 0.0, .seed = seed};
  nlohmann::json w = {{"K", K}, {"C", C}, {"delta", delta}};
  if (n > 0) {
    const auto k = detail::argmax(ratio);
    r.empirical_constant = ratio[k];
    w["A"] = detail::to_json_matrix(As[k]);
    w["T"] = detail::to_json_matrix(Ts[k]);
  }
  return detail::finish(std::move(r), v, std::move(w));
}

/// Coercivity W >= C1 (|F|^p + J^-r) + C2 with C1 = min(min b_j, c)/2 and
/// C2 = -4c over stretches in [1e-4, 1e4]^2, Theta(1e-6) >= 1e10, and the
/// exponent conditions p > 4/3, q > 1, p > 2, r > p/(p-2). Each condition
/// contributes a normalized margin that is positive exactly when it fails.
inline CheckReport check_growth(const IsotropicModel& model, std::size_t n = 10000, std::uint64_t seed = 0) {
  double bmin = std::numeric_limits<double>::infinity();
  for (const auto& t : model.ogden_terms) bmin = std::min(bmin, t.coefficient);
  const double c = model.theta.c;
  const double C1 = std::min(bmin, c) / 2.0;
  const double C2 = -4.0 * c;
  const double p = model.growth_exponent();
  const double q = model.theta.q, r_exp = model.theta.r;

  std::vector<double> v(n);
  std::vector<Vec2> lam(n);
  detail::sample_chunks(n, seed, [&](std::size_t i, std::mt19937_64& rng) {
    const double l1 = log_uniform(rng, 1e-4, 1e4), l2 = log_uniform(rng, 1e-4, 1e4);
    lam[i] = Vec2(l1, l2);
    const double W = energy_from_stretches(model, l1, l2);
    const double rhs = C1 * (std::pow(std::hypot(l1, l2), p) + std::pow(l1 * l2, -r_exp)) + C2;
    v[i] = (rhs - W) / std::max(1.0, std::abs(rhs));
  });

  // Strict inequalities: a zero margin counts as failure.
  auto strict = [](double margin) { return margin >= 0.0 ? std::max(margin, std::numeric_limits<double>::min()) : margin; };
  const double m_h1p = strict(4.0 / 3.0 - p);
  const double m_h1q = strict(1.0 - q);
  const double m_p2 = strict(2.0 - p);
  const double m_r = p > 2.0 ? strict(p / (p - 2.0) - r_exp) : m_p2;
  const double theta_small = model.theta.value(1e-6);
  const double m_theta = (1e10 - theta_small) / 1e10;

  CheckReport rep{.name = "growth", .tolerance = 0.0, .seed = seed};
  nlohmann::json w = {{"C1", C1},
                      {"C2", C2},
                      {"p", p},
                      {"h1", model.h1_satisfied()},
                      {"h1prime", model.h1prime_satisfied()},
                      {"theta_at_1e-6", theta_small}};
  std::size_t k = 0;
  if (n > 0) {
    k = detail::argmax(v);
    w["lambda1"] = lam[k].x();
    w["lambda2"] = lam[k].y();
    w["sampled_margin"] = v[k];
  }
  rep = detail::finish(std::move(rep), v, std::move(w));
  const double flags = std::max({m_h1p, m_h1q, m_p2, m_r, m_theta});
  rep.worst_violation = std::max(rep.worst_violation, flags);
  rep.passed = rep.worst_violation <= rep.tolerance;
  rep.empirical_constant = C1;
  return rep;
}

/// F+ - F- is rank one while the midpoint compresses the second stretch to
/// eps mu, so W(F_bar) exceeds the average once Theta(eps) dominates.
struct RankOneWitness {
  double lambda = 1.0, mu = 1.0, epsilon = 0.1;
  Mat32 F_plus = Mat32::Zero(), F_minus = Mat32::Zero(), F_bar = Mat32::Zero();
  double W_plus = 0.0, W_minus = 0.0, W_bar = 0.0;
  double gap = 0.0;  // W_bar - (W_plus + W_minus)/2
};

inline RankOneWitness rank_one_counterexample(const IsotropicModel& model, double lambda, double mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidEpsilon, "epsilon must lie in (0, 1)");
  if (!(lambda > 0.0 && mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda and mu must be positive");
  RankOneWitness w{.lambda = lambda, .mu = mu, .epsilon = eps};
  const double s = mu * std::sqrt(1.0 - eps * eps);
  w.F_plus << lambda, 0.0, 0.0, eps * mu, 0.0, s;
  w.F_minus << lambda, 0.0, 0.0, eps * mu, 0.0, -s;
  w.F_bar = 0.5 * (w.F_plus + w.F_minus);
  w.W_plus = energy_density(model, w.F_plus);
  w.W_minus = energy_density(model, w.F_minus);
  w.W_bar = energy_density(model, w.F_bar);
  w.gap = w.W_bar - 0.5 * (w.W_plus + w.W_minus);
  return w;
}

inline nlohmann::json to_json(const RankOneWitness& w) {
  return {{"lambda", w.lambda},
          {"mu", w.mu},
          {"epsilon", w.epsilon},
          {"F_plus", detail::to_json_matrix(w.F_plus)},
          {"F_minus", detail::to_json_matrix(w.F_minus)},
          {"F_bar", detail::to_json_matrix(w.F_bar)},
          {"W_plus", w.W_plus},
          {"W_minus", w.W_minus},
          {"W_bar", w.W_bar},
          {"gap", w.gap}};
}

struct VerifyOptions {
  std::size_t samples = 1000;
  std::size_t convexity_samples = 100000;
  std::size_t lemma9_samples = 10000;
  double lemma9_delta = 0.01;
  std::uint64_t seed = 42;
};

/// The eight standard checks, in report order.
inline std::vector<CheckReport> run_all_checks(const IsotropicModel& model, const VerifyOptions& o) {
  std::vector<CheckReport> out;
  out.push_back(check_objectivity(model, o.samples, o.seed));
  out.push_back(check_isotropy(model, o.samples, o.seed));
  out.push_back(check_midpoint_convexity(model, o.convexity_samples, o.seed));
  out.push_back(check_negative_control(o.convexity_samples, o.seed));
  out.push_back(check_stress_consistency(model, o.samples, o.seed));
  out.push_back(check_h4(model, o.samples * 10, o.seed));
  try {
    out.push_back(check_lemma9(model, o.lemma9_delta, o.lemma9_samples, o.seed));
  } catch (const Error& e) {
    CheckReport r{.name = "lemma9", .worst_violation = std::numeric_limits<double>::infinity(), .seed = o.seed};
    r.witness = {{"error", e.what()}};
    out.push_back(r);
  }
  out.push_back(check_growth(model, o.samples * 10, o.seed));
  return out;
}

}  // namespace membrane
