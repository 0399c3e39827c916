#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmv/types.hpp"

namespace cmv {

using MatrixFunction = std::function<Matrix(Complex)>;

// Midpoint grid on the circle: n cells of width 2*pi/n, centers (j+1/2)*2*pi/n.
std::vector<double> cell_centers(int n);

// Cayley maps between the disk classes. The plus orientation pairs
// contractions with positive real part, the minus orientation with negative
// real part; free values are 0 <-> I and 0 <-> -I respectively.
Matrix schur_to_cayley(const Matrix& phi);        // (I+Phi)(I-Phi)^{-1}
Matrix cayley_to_schur(const Matrix& f);          // (F-I)(F+I)^{-1}
Matrix schur_to_cayley_minus(const Matrix& g);    // (G-I)^{-1}(G+I)
Matrix cayley_to_schur_minus(const Matrix& f);    // (F+I)(F-I)^{-1}

// Pseudo-continuation across the circle: -f(1/conj(z))^* for |z| > 1.
Matrix reflect_exterior(const MatrixFunction& f, Complex z);

// Nonnegative matrix measure on the circle: piecewise cell masses on the
// midpoint grid plus a finite list of atoms.
struct MatrixCircleMeasure {
  int m = 0;
  std::vector<double> theta_center;  // grid cell centers (possibly empty)
  std::vector<Matrix> cell;          // mass per cell (not a density)
  struct Atom {
    double theta;
    Matrix weight;
  };
  std::vector<Atom> atoms;

  int n_cells() const { return int(theta_center.size()); }
  Matrix total() const;
  Matrix moment(long p) const;  // integral of e^{i p theta}
  // Mass carried on [lo, hi) with angles compared modulo 2*pi; cells count by
  // their center. Requires 0 < hi - lo <= 2*pi.
  Matrix mass_on(double lo, double hi) const;
};

Matrix poisson_integral(const MatrixCircleMeasure& mu, Complex z);

struct StieltjesResult {
  MatrixCircleMeasure measure;
  double clipped = 0;  // trace mass removed by the positive-part projection
};

// Weak-star inversion of the real part sampled on the radius-r midpoint grid.
StieltjesResult stieltjes_invert(const MatrixFunction& f, int m, double r, int n);

// Phase profile of a function with values of positive real part, sampled on
// the radius-r grid: the skew part of the principal logarithm per cell.
struct XiProfile {
  int m = 0;
  double r = 0;
  std::vector<double> theta;
  std::vector<Matrix> xi;  // self-adjoint
  std::vector<char> ok;    // 0 where the logarithm was unavailable

  int n() const { return int(theta.size()); }
  Matrix mean() const;      // grid average, invalid cells contributing zero
  double max_angle() const; // largest |eigenvalue| over valid cells
  long invalid_count() const;
};

struct ExpHerglotzResult {
  Matrix d;  // minus the self-adjoint part of log f(0)
  XiProfile xi;
};

ExpHerglotzResult exp_herglotz(const MatrixFunction& f, int m, double r, int n);

// Rebuild the function at |w| < r from its representation data:
// exp(-D + i * avg_cells K(r zeta_c, w) Xi_c) with K the Schwarz kernel.
Matrix herglotz_synthesize(const ExpHerglotzResult& rep, Complex w);

// CSV emitters; complex entries are written row major as re_ij, im_ij pairs
// with 17 significant digits.
std::string xi_to_csv(const XiProfile& xi);
std::string measure_to_csv(const MatrixCircleMeasure& mu);

}  // namespace cmv
