#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "cmv/verblunsky.hpp"

namespace cmv {

// Block-banded matrix over lattice sites [k_lo, k_hi] with m x m blocks at
// block offsets -hw..hw.
class BlockBand {
 public:
  BlockBand(long k_lo, long k_hi, int m, int hw);

  long k_lo() const { return k_lo_; }
  long k_hi() const { return k_hi_; }
  int m() const { return m_; }
  int hw() const { return hw_; }
  long n_sites() const { return k_hi_ - k_lo_ + 1; }
  Eigen::Index dim() const { return Eigen::Index(n_sites()) * m_; }
  Eigen::Index row0(long site) const { return Eigen::Index(site - k_lo_) * m_; }
  bool in_range(long site) const { return site >= k_lo_ && site <= k_hi_; }

  Matrix& block(long site, int off);
  const Matrix& block(long site, int off) const;

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& x) const;
  Matrix apply_block(const Matrix& x) const;          // x is dim() x c
  Matrix apply_adjoint_block(const Matrix& x) const;

  Eigen::SparseMatrix<Complex> to_sparse() const;
  Matrix to_dense() const;

  // ||A^* A - I||_F computed bandwise.
  double gram_defect() const;

  static BlockBand product(const BlockBand& a, const BlockBand& b);

 private:
  long k_lo_, k_hi_;
  int m_, hw_;
  std::vector<Matrix> blocks_;
};

// Finite unitary section of the CMV operator. Sites span [k_lo, k_hi] with
// k_lo even and k_hi odd; the two theta blocks straddling the cuts are
// replaced by unitary fills, which decouples the section exactly.
struct CmvTruncation {
  int m = 1;
  long k_lo = 0;
  long k_hi = 0;
  Matrix boundary_left;   // replaces alpha at site k_lo
  Matrix boundary_right;  // replaces alpha at site k_hi + 1
  VerblunskySequence seq = VerblunskySequence::free_seq(1);
  BlockBand v{0, 1, 1, 1}, w{0, 1, 1, 1}, u{0, 1, 1, 2};

  long n_sites() const { return k_hi - k_lo + 1; }
  Eigen::Index dim() const { return Eigen::Index(n_sites()) * m; }
  Eigen::Index row0(long site) const { return Eigen::Index(site - k_lo) * m; }
};

// Requested ranges are snapped outward so k_lo is even and k_hi odd.
// Boundary unitaries default to the identity.
CmvTruncation build_truncation(const VerblunskySequence& seq, long k_lo, long k_hi,
                               const Matrix& boundary_left = Matrix(),
                               const Matrix& boundary_right = Matrix());

enum class ApplyWhich { U, UStar, V, W };

Vector apply(const CmvTruncation& t, ApplyWhich which, const Vector& x);

// Solves (U - z) y = rhs with a residual certificate. Points within 1e-6 of
// the unit circle are rejected.
Vector resolvent_solve(const CmvTruncation& t, Complex z, const Vector& rhs);

// Reusable factorization for sweeps over many z on one truncation.
class ResolventSolver {
 public:
  explicit ResolventSolver(const CmvTruncation& t);
  void set_z(Complex z);
  Vector solve(const Vector& rhs) const;
  Matrix solve_block(const Matrix& rhs) const;  // rhs is dim x c
  Complex z() const { return z_; }

 private:
  Eigen::SparseMatrix<Complex> base_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>> lu_;
  Complex z_{0, 0};
  bool factorized_ = false;
  Eigen::Index dim_ = 0;
};

// Block (k0,k0) of (U^*)^p, exact for the doubly infinite operator as long as
// k0 keeps distance > 2p + 1 from both cuts.
Matrix diagonal_moment(const CmvTruncation& t, long k0, int p);

// Coordinate list "row col re im" with enough digits to round trip.
std::string export_coo(const CmvTruncation& t);

}  // namespace cmv
