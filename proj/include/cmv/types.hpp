#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I1{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;
inline constexpr double TWO_PI = 2.0 * PI;

// Central numerical tolerances. Hermiticity/unitarity certificates use
// tol_herm/tol_unitary, exact algebraic identities tol_alg, eigensolves tol_eig.
struct Tolerances {
  double herm = 1e-10;
  double unitary = 1e-10;
  double alg = 1e-12;
  double eig = 1e-9;
  double psd = 1e-10;
  // strict-contraction margin: ||alpha|| must stay below 1 - margin
  double contraction_margin = 1e-12;
};

inline const Tolerances& tols() {
  static const Tolerances t{};
  return t;
}

enum class Err {
  NotHermitian,
  NotPsd,
  SpectrumNotInRightHalfPlane,
  NotUnitary,
  NotContractive,
  NotSquare,
  SizeMismatch,
  BadRange,
  BadArc,
  BadGrid,
  NearUnitCircle,
  SolveFailure,
  TooCloseToBoundary,
  PivotSingular,
  NoConvergence,
  LogDomainViolation,
  ScheduleTooCoarse,
  BadConfig,
  IoFailure,
};

const char* err_name(Err e);

// Numerical/domain failure carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Hermitian and skew parts: A = herm_part(A) + i*imag_part(A), both Hermitian.
inline Matrix herm_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }
inline Matrix imag_part(const Matrix& a) { return (a - a.adjoint()) / Complex(0.0, 2.0); }

inline double wrap_angle(double theta) {
  double t = std::fmod(theta, TWO_PI);
  if (t < 0) t += TWO_PI;
  return t;
}

}  // namespace cmv
