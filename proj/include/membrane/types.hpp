#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace membrane {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

enum class ErrorKind {
  InvalidArgument,
  OffSurface,
  AmbiguousProjection,
  NoConvergence,
  RankDeficient,
  NonpositiveJ,
  InvalidEpsilon,
  DeltaTooLarge,
  DegenerateElement,
  NegativeJ,
  InfeasibleStart,
  BoundaryTooClose,
  IrregularValue,
  ChartSpanFailure,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OffSurface: return "OffSurface";
    case ErrorKind::AmbiguousProjection: return "AmbiguousProjection";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonpositiveJ: return "NonpositiveJ";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorKind::DegenerateElement: return "DegenerateElement";
    case ErrorKind::NegativeJ: return "NegativeJ";
    case ErrorKind::InfeasibleStart: return "InfeasibleStart";
    case ErrorKind::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorKind::IrregularValue: return "IrregularValue";
    case ErrorKind::ChartSpanFailure: return "ChartSpanFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace membrane
