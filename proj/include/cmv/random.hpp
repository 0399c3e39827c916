#pragma once

#include <cstdint>
#include <random>

#include "cmv/linalg.hpp"
#include "cmv/types.hpp"

namespace cmv {

// Deterministic generator for test data and controls. Distributions are
// hand-rolled on top of mt19937_64 so streams do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double u01() { return std::ldexp(double(g_() >> 11), -53); }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(g_() % std::uint64_t(hi - lo + 1));
  }

  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = std::max(u01(), 1e-300);
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(TWO_PI * u2);
    has_spare_ = true;
    return r * std::cos(TWO_PI * u2);
  }

  Complex cgauss() { return {gauss() * M_SQRT1_2, gauss() * M_SQRT1_2}; }

  Matrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cgauss();
    return a;
  }

  // Strict contraction with norm uniform in (lo_norm, hi_norm).
  Matrix contraction(Eigen::Index m, double hi_norm = 0.9, double lo_norm = 0.05) {
    Matrix g = gaussian(m, m);
    double s = operator_norm(g);
    if (s == 0.0) return Matrix::Zero(m, m);
    return g * (uniform(lo_norm, hi_norm) / s);
  }

  // Haar-distributed unitary: QR of a Gaussian with phase-fixed R diagonal.
  Matrix unitary(Eigen::Index m) {
    Matrix g = gaussian(m, m);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(m, m);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < m; ++j) {
      Complex d = r(j, j);
      q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
  }

  Matrix hermitian_psd(Eigen::Index m) {
    Matrix g = gaussian(m, m);
    return g.adjoint() * g;
  }

 private:
  std::mt19937_64 g_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cmv
