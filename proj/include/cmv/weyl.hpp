#pragma once

#include <vector>

#include "cmv/cmv_operator.hpp"
#include "cmv/types.hpp"
#include "cmv/verblunsky.hpp"

namespace cmv {

// Matrix solution quadruple of the band equations W P = z R and V R = P
// (same recursions for the second pair Q, S), normalized at a base site.
struct WeylQuad {
  int m = 0;
  long k_lo = 0, k_hi = 0, k0 = 0;
  Complex z;
  std::vector<Matrix> p, q, r, s;

  const Matrix& P(long k) const { return p[size_t(k - k_lo)]; }
  const Matrix& Q(long k) const { return q[size_t(k - k_lo)]; }
  const Matrix& R(long k) const { return r[size_t(k - k_lo)]; }
  const Matrix& S(long k) const { return s[size_t(k - k_lo)]; }
};

WeylQuad generate_quad(const VerblunskySequence& seq, Complex z, long k0, long k_lo, long k_hi);

// Largest block residual of the band equations over the rows of a covering
// truncation whose unmodified rows contain the quad range.
double quad_residual(const CmvTruncation& t, const WeylQuad& quad);

// One step of the downward contraction recursion for the right Schur
// function: given phi at site k, produce it at site k-1, consuming alpha_k.
Matrix riccati_step_down(const Matrix& alpha_k, Complex z, const Matrix& phi_k);
double riccati_down_residual(const Matrix& alpha_k, Complex z, const Matrix& phi_km1,
                             const Matrix& phi_k);

// One step of the upward recursion for the inverted left Schur function:
// given g = phi_minus^{-1} at site k-1, produce it at site k.
Matrix riccati_step_up_minus(const Matrix& alpha_k, Complex z, const Matrix& g_km1);
double riccati_up_residual(const Matrix& alpha_k, Complex z, const Matrix& g_km1,
                           const Matrix& g_k);

struct SchurOptions {
  double tol = 1e-12;
  long start_depth = 64;
  long max_depth = 1L << 22;
};

// Right and (inverted) left Schur functions at a site. Compactly supported
// coefficients are handled exactly by running the recursion from outside the
// support; otherwise the seed-zero iteration is deepened until it settles.
Matrix schur_plus(const VerblunskySequence& seq, Complex z, long k, const SchurOptions& opt = {});
Matrix schur_minus_inv(const VerblunskySequence& seq, Complex z, long k,
                       const SchurOptions& opt = {});

// Fixed-depth variants with an explicit seed, for convergence certificates.
Matrix schur_plus_fixed(const VerblunskySequence& seq, Complex z, long k, const Matrix& seed,
                        long depth);
Matrix schur_minus_inv_fixed(const VerblunskySequence& seq, Complex z, long k, const Matrix& seed,
                             long depth);

struct MPair {
  Matrix m_plus;   // positive real part
  Matrix m_minus;  // negative real part
};

MPair m_functions(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt = {});

// Schur function of the diagonal Weyl entry at the base site: the two
// half-lattice factors multiplied in the parity order of the base site.
Matrix phi11(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt = {});
Matrix m11_weyl(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt = {});

// Same diagonal Weyl function from a finite truncation resolvent.
Matrix m11_truncation(const CmvTruncation& t, long k0, Complex z);
Matrix m11_truncation(ResolventSolver& rs, const CmvTruncation& t, long k0, Complex z);

// Block resolvent entry assembled from the quads and the two Weyl functions.
Matrix resolvent_entry_weyl(const VerblunskySequence& seq, Complex z, long k0, long k, long kp,
                            const SchurOptions& opt = {});

}  // namespace cmv
