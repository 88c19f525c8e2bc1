#pragma once

// Isotropic membrane energies W(F) = Upsilon(l1, l2) + b (F.F)/J + Theta(J),
// their principal stretches and stresses.

#include "membrane/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace membrane {

/// Theta(J) = c (J^q + J^-r - 2).
struct ThetaModel {
  double c = 1.5;
  double q = 2.0;
  double r = 4.0;

  double value(double J) const { return c * (std::pow(J, q) + std::pow(J, -r) - 2.0); }
  double derivative(double J) const {
    return c * (q * std::pow(J, q - 1.0) - r * std::pow(J, -r - 1.0));
  }
  /// J Theta'(J)
  double j_derivative(double J) const { return c * (q * std::pow(J, q) - r * std::pow(J, -r)); }
  double second_derivative(double J) const {
    return c * (q * (q - 1.0) * std::pow(J, q - 2.0) + r * (r + 1.0) * std::pow(J, -r - 2.0));
  }

  bool operator==(const ThetaModel&) const = default;
};

struct OgdenTerm {
  double coefficient = 1.0;  // b_j
  double exponent = 3.0;     // gamma_j

  bool operator==(const OgdenTerm&) const = default;
};

struct IsotropicModel {
  std::vector<OgdenTerm> ogden_terms{OgdenTerm{}};
  double b = 1.0;
  ThetaModel theta{};
  std::string label = "default";

  bool operator==(const IsotropicModel&) const = default;

  /// Growth exponent p = max_j gamma_j.
  double growth_exponent() const {
    double p = 0.0;
    for (const auto& t : ogden_terms) p = std::max(p, t.exponent);
    return p;
  }

  /// p > 4/3 with Theta dominating J^q (q > 1).
  bool h1_satisfied() const { return growth_exponent() > 4.0 / 3.0 && theta.q > 1.0; }

  /// p > 2 and r > p / (p - 2).
  bool h1prime_satisfied() const {
    const double p = growth_exponent();
    return p > 2.0 && theta.r > p / (p - 2.0);
  }

  /// Throws InvalidArgument unless every coefficient is in range.
  void validate() const {
    if (ogden_terms.empty()) throw Error(ErrorKind::InvalidArgument, "model needs at least one Ogden term");
    for (const auto& t : ogden_terms) {
      if (!(t.coefficient > 0.0)) throw Error(ErrorKind::InvalidArgument, "Ogden coefficient must be > 0");
      if (!(t.exponent >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Ogden exponent must be >= 1");
    }
    if (!(b >= 0.0)) throw Error(ErrorKind::InvalidArgument, "b must be >= 0");
    if (!(theta.c > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta.c must be > 0");
    if (!(theta.q > 1.0)) throw Error(ErrorKind::InvalidArgument, "theta.q must be > 1");
    if (!(theta.r > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta.r must be > 0");
  }
};

/// Principal stretches with left (d) and right (r) singular vectors:
/// F r_g = lambda_g d_g.
struct StretchPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec3 d1 = Vec3::Zero(), d2 = Vec3::Zero();
  Vec2 r1 = Vec2::UnitX(), r2 = Vec2::UnitY();

  double area_ratio() const { return lambda1 * lambda2; }
};

struct StressState {
  Mat32 pk1 = Mat32::Zero();
  Mat3 kirchhoff = Mat3::Zero();
  Mat3 cauchy = Mat3::Zero();
};

namespace detail {

// Eigenvalues (mu1 >= mu2 >= 0) and the unit eigenvector angle of C = F^T F.
struct CauchyGreenSpectrum {
  double mu1, mu2, angle, det;
};

inline CauchyGreenSpectrum spectrum(const Mat32& F) {
  const Mat2 C = F.transpose() * F;
  const double tr = C(0, 0) + C(1, 1);
  const double det = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0);
  const double half_gap = std::hypot(0.5 * (C(0, 0) - C(1, 1)), C(0, 1));
  const double mu1 = 0.5 * tr + half_gap;
  // det / mu1 avoids cancellation in tr/2 - half_gap.
  const double mu2 = mu1 > 0.0 ? std::max(0.0, det / mu1) : 0.0;
  const double angle = 0.5 * std::atan2(2.0 * C(0, 1), C(0, 0) - C(1, 1));
  return {mu1, mu2, angle, det};
}

inline bool rank_deficient(const CauchyGreenSpectrum& s) {
  const double tr = s.mu1 + s.mu2;
  return !(s.det > 1e-28 * tr * tr) || !(s.mu2 > 0.0);
}

}  // namespace detail

inline StretchPair stretches(const Mat32& F) {
  const auto s = detail::spectrum(F);
  if (detail::rank_deficient(s))
    throw Error(ErrorKind::RankDeficient, "det(F^T F) is not positive");
  StretchPair out;
  out.lambda1 = std::sqrt(s.mu1);
  out.lambda2 = std::sqrt(s.mu2);
  out.r1 = Vec2(std::cos(s.angle), std::sin(s.angle));
  out.r2 = Vec2(-out.r1.y(), out.r1.x());
  out.d1 = F * out.r1 / out.lambda1;
  out.d2 = F * out.r2 / out.lambda2;
  // Near repeated stretches the angle is ill-conditioned but F is conformal,
  // so any orthonormal pair of the range works; re-orthogonalise d2.
  if (std::abs(out.lambda1 - out.lambda2) < 1e-8 * out.lambda1) {
    out.d1.normalize();
    out.d2 = (out.d2 - out.d2.dot(out.d1) * out.d1).normalized();
  }
  return out;
}

/// Upsilon(l1, l2) + b (l1^2 + l2^2)/(l1 l2) + Theta(l1 l2).
inline double energy_from_stretches(const IsotropicModel& m, double l1, double l2) {
  double ups = 0.0;
  for (const auto& t : m.ogden_terms)
    ups += t.coefficient * (std::pow(l1, t.exponent) + std::pow(l2, t.exponent));
  const double J = l1 * l2;
  return ups + m.b * (l1 * l1 + l2 * l2) / J + m.theta.value(J);
}

/// (l1 Phi_,1, l2 Phi_,2): the principal Kirchhoff stresses.
inline Vec2 kirchhoff_principal(const IsotropicModel& m, double l1, double l2) {
  const double J = l1 * l2;
  double s1 = 0.0, s2 = 0.0;
  for (const auto& t : m.ogden_terms) {
    s1 += t.coefficient * t.exponent * std::pow(l1, t.exponent);
    s2 += t.coefficient * t.exponent * std::pow(l2, t.exponent);
  }
  const double shear = m.b * (l1 * l1 - l2 * l2) / J;
  const double vol = m.theta.j_derivative(J);
  return Vec2(s1 + shear + vol, s2 - shear + vol);
}

inline double energy_density(const IsotropicModel& m, const Mat32& F) {
  const StretchPair s = stretches(F);
  return energy_from_stretches(m, s.lambda1, s.lambda2);
}

/// PK1 = sum Phi_,g d_g (x) r_g, Kirchhoff = sum l_g Phi_,g d_g (x) d_g, Cauchy = Kirchhoff / J.
inline StressState pk1_stress(const IsotropicModel& m, const Mat32& F) {
  const StretchPair s = stretches(F);
  const Vec2 tau = kirchhoff_principal(m, s.lambda1, s.lambda2);
  StressState out;
  out.pk1 = (tau.x() / s.lambda1) * s.d1 * s.r1.transpose() + (tau.y() / s.lambda2) * s.d2 * s.r2.transpose();
  out.kirchhoff = tau.x() * s.d1 * s.d1.transpose() + tau.y() * s.d2 * s.d2.transpose();
  out.cauchy = out.kirchhoff / s.area_ratio();
  return out;
}

/// Phi(F, J) with F and J independent. Singular values of F may vanish.
inline double phi_split(const IsotropicModel& m, const Mat32& F, double J) {
  if (!(J > 0.0)) throw Error(ErrorKind::NonpositiveJ, "phi_split requires J > 0");
  const auto s = detail::spectrum(F);
  const double a1 = std::sqrt(s.mu1), a2 = std::sqrt(s.mu2);
  double ups = 0.0;
  for (const auto& t : m.ogden_terms)
    ups += t.coefficient * (std::pow(a1, t.exponent) + std::pow(a2, t.exponent));
  return ups + m.b * F.squaredNorm() / J + m.theta.value(J);
}

}  // namespace membrane
