#include "cmv/cmv_operator.hpp"

#include <cinttypes>
#include <cstdio>

#include "cmv/linalg.hpp"

namespace cmv {

BlockBand::BlockBand(long k_lo, long k_hi, int m, int hw)
    : k_lo_(k_lo), k_hi_(k_hi), m_(m), hw_(hw) {
  require(k_hi >= k_lo, Err::BadRange, "BlockBand range");
  require(m >= 1 && hw >= 0, Err::BadConfig, "BlockBand shape");
  blocks_.assign(size_t(n_sites()) * size_t(2 * hw + 1), Matrix::Zero(m, m));
}

Matrix& BlockBand::block(long site, int off) {
  return blocks_[size_t(site - k_lo_) * size_t(2 * hw_ + 1) + size_t(off + hw_)];
}

const Matrix& BlockBand::block(long site, int off) const {
  return blocks_[size_t(site - k_lo_) * size_t(2 * hw_ + 1) + size_t(off + hw_)];
}

Matrix BlockBand::apply_block(const Matrix& x) const {
  require(x.rows() == dim(), Err::SizeMismatch, "BlockBand apply");
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (long r = k_lo_; r <= k_hi_; ++r) {
    auto out = y.middleRows(row0(r), m_);
    for (int off = -hw_; off <= hw_; ++off) {
      long c = r + off;
      if (!in_range(c)) continue;
      out.noalias() += block(r, off) * x.middleRows(row0(c), m_);
    }
  }
  return y;
}

Matrix BlockBand::apply_adjoint_block(const Matrix& x) const {
  require(x.rows() == dim(), Err::SizeMismatch, "BlockBand apply_adjoint");
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (long r = k_lo_; r <= k_hi_; ++r) {
    for (int off = -hw_; off <= hw_; ++off) {
      long c = r + off;
      if (!in_range(c)) continue;
      y.middleRows(row0(c), m_).noalias() += block(r, off).adjoint() * x.middleRows(row0(r), m_);
    }
  }
  return y;
}

Vector BlockBand::apply(const Vector& x) const { return apply_block(Matrix(x)).col(0); }

Vector BlockBand::apply_adjoint(const Vector& x) const {
  return apply_adjoint_block(Matrix(x)).col(0);
}

Eigen::SparseMatrix<Complex> BlockBand::to_sparse() const {
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(size_t(dim()) * size_t((2 * hw_ + 1) * m_));
  for (long r = k_lo_; r <= k_hi_; ++r)
    for (int off = -hw_; off <= hw_; ++off) {
      long c = r + off;
      if (!in_range(c)) continue;
      const Matrix& b = block(r, off);
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          trips.emplace_back(int(row0(r)) + i, int(row0(c)) + j, b(i, j));
    }
  Eigen::SparseMatrix<Complex> s(dim(), dim());
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

Matrix BlockBand::to_dense() const {
  Matrix d = Matrix::Zero(dim(), dim());
  for (long r = k_lo_; r <= k_hi_; ++r)
    for (int off = -hw_; off <= hw_; ++off) {
      long c = r + off;
      if (in_range(c)) d.block(row0(r), row0(c), m_, m_) = block(r, off);
    }
  return d;
}

double BlockBand::gram_defect() const {
  // (A^* A)(r,c) = sum_s A(s,r)^* A(s,c); band offsets stay within 2*hw.
  double acc = 0.0;
  for (long r = k_lo_; r <= k_hi_; ++r) {
    for (long c = r - 2 * hw_; c <= r + 2 * hw_; ++c) {
      if (!in_range(c)) continue;
      Matrix g = Matrix::Zero(m_, m_);
      for (long s = std::max(r, c) - hw_; s <= std::min(r, c) + hw_; ++s) {
        if (!in_range(s)) continue;
        int offr = int(r - s), offc = int(c - s);
        if (std::abs(offr) > hw_ || std::abs(offc) > hw_) continue;
        g.noalias() += block(s, offr).adjoint() * block(s, offc);
      }
      if (r == c) g -= Matrix::Identity(m_, m_);
      acc += g.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

BlockBand BlockBand::product(const BlockBand& a, const BlockBand& b) {
  require(a.k_lo_ == b.k_lo_ && a.k_hi_ == b.k_hi_ && a.m_ == b.m_, Err::SizeMismatch,
          "BlockBand product");
  BlockBand c(a.k_lo_, a.k_hi_, a.m_, a.hw_ + b.hw_);
  for (long r = a.k_lo_; r <= a.k_hi_; ++r)
    for (int oa = -a.hw_; oa <= a.hw_; ++oa) {
      long s = r + oa;
      if (!a.in_range(s)) continue;
      for (int ob = -b.hw_; ob <= b.hw_; ++ob) {
        long col = s + ob;
        if (!b.in_range(col)) continue;
        c.block(r, int(col - r)).noalias() += a.block(r, oa) * b.block(s, ob);
      }
    }
  return c;
}

namespace {

void place_theta(BlockBand& band, long j, const Matrix& alpha) {
  // Theta_j couples sites (j-1, j).
  Matrix rh = rho(alpha);
  Matrix rht = rho_tilde(alpha);
  band.block(j - 1, 0) = -alpha;
  band.block(j - 1, +1) = rht;
  band.block(j, -1) = rh;
  band.block(j, 0) = alpha.adjoint();
}

}  // namespace

CmvTruncation build_truncation(const VerblunskySequence& seq, long k_lo, long k_hi,
                               const Matrix& boundary_left, const Matrix& boundary_right) {
  const int m = seq.m();
  // Snap outward: k_lo even, k_hi odd, so W covers the range with whole
  // theta blocks and V dangles exactly one site at each end.
  if (k_lo % 2 != 0) --k_lo;
  if (k_hi % 2 == 0) ++k_hi;
  require(k_hi - k_lo >= 5, Err::BadRange, "truncation too short");

  Matrix bl = boundary_left.size() ? boundary_left : Matrix(Matrix::Identity(m, m));
  Matrix br = boundary_right.size() ? boundary_right : Matrix(Matrix::Identity(m, m));
  require(bl.rows() == m && bl.cols() == m && unitarity_defect(bl) <= tols().unitary,
          Err::NotUnitary, "boundary_left");
  require(br.rows() == m && br.cols() == m && unitarity_defect(br) <= tols().unitary,
          Err::NotUnitary, "boundary_right");

  CmvTruncation t;
  t.m = m;
  t.k_lo = k_lo;
  t.k_hi = k_hi;
  t.boundary_left = bl;
  t.boundary_right = br;
  t.seq = seq;
  t.v = BlockBand(k_lo, k_hi, m, 1);
  t.w = BlockBand(k_lo, k_hi, m, 1);

  // W carries Theta at odd indices k_lo+1, k_lo+3, ..., k_hi.
  for (long j = k_lo + 1; j <= k_hi; j += 2) place_theta(t.w, j, seq.alpha(j));
  // V carries Theta at even indices k_lo+2, ..., k_hi-1 plus the two cut
  // fills: the alpha^* corner of the replaced Theta_{k_lo} and the -alpha
  // corner of the replaced Theta_{k_hi+1}.
  for (long j = k_lo + 2; j <= k_hi - 1; j += 2) place_theta(t.v, j, seq.alpha(j));
  t.v.block(k_lo, 0) = bl.adjoint();
  t.v.block(k_hi, 0) = -br;

  t.u = BlockBand::product(t.v, t.w);
  return t;
}

Vector apply(const CmvTruncation& t, ApplyWhich which, const Vector& x) {
  switch (which) {
    case ApplyWhich::U: return t.u.apply(x);
    case ApplyWhich::UStar: return t.u.apply_adjoint(x);
    case ApplyWhich::V: return t.v.apply(x);
    case ApplyWhich::W: return t.w.apply(x);
  }
  fail(Err::BadConfig, "apply which");
}

ResolventSolver::ResolventSolver(const CmvTruncation& t) : base_(t.u.to_sparse()), dim_(t.dim()) {
  // Band storage always includes the diagonal, so the pattern of U - zI is
  // the pattern of U.
  base_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>>();
  lu_->analyzePattern(base_);
}

void ResolventSolver::set_z(Complex z) {
  require(std::abs(1.0 - std::abs(z)) >= 1e-6, Err::NearUnitCircle, "resolvent z");
  Eigen::SparseMatrix<Complex> a = base_;
  for (Eigen::Index i = 0; i < dim_; ++i) a.coeffRef(i, i) -= z;
  lu_->factorize(a);
  require(lu_->info() == Eigen::Success, Err::SolveFailure, "resolvent factorization");
  z_ = z;
  factorized_ = true;
}

Vector ResolventSolver::solve(const Vector& rhs) const {
  require(factorized_, Err::SolveFailure, "resolvent not factorized");
  return lu_->solve(rhs);
}

Matrix ResolventSolver::solve_block(const Matrix& rhs) const {
  require(factorized_, Err::SolveFailure, "resolvent not factorized");
  return lu_->solve(rhs);
}

Vector resolvent_solve(const CmvTruncation& t, Complex z, const Vector& rhs) {
  require(rhs.size() == t.dim(), Err::SizeMismatch, "resolvent rhs");
  require(std::abs(1.0 - std::abs(z)) >= 1e-6, Err::NearUnitCircle, "resolvent z");
  if (z == Complex(0, 0)) return t.u.apply_adjoint(rhs);
  ResolventSolver solver(t);
  solver.set_z(z);
  Vector y = solver.solve(rhs);
  double resid = (t.u.apply(y) - z * y - rhs).norm();
  require(resid <= 1e-10 * std::max(1.0, rhs.norm()), Err::SolveFailure,
          "resolvent residual too large");
  return y;
}

Matrix diagonal_moment(const CmvTruncation& t, long k0, int p) {
  require(p >= 0, Err::BadConfig, "moment order");
  require(t.u.in_range(k0), Err::BadRange, "moment site");
  require(k0 - t.k_lo > 2 * p + 1 && t.k_hi - k0 > 2 * p + 1, Err::TooCloseToBoundary,
          "moment clearance");
  Matrix x = Matrix::Zero(t.dim(), t.m);
  x.middleRows(t.row0(k0), t.m) = Matrix::Identity(t.m, t.m);
  for (int i = 0; i < p; ++i) x = t.u.apply_adjoint_block(x);
  return x.middleRows(t.row0(k0), t.m);
}

std::string export_coo(const CmvTruncation& t) {
  std::string out;
  char buf[128];
  const BlockBand& u = t.u;
  for (long r = t.k_lo; r <= t.k_hi; ++r)
    for (int off = -u.hw(); off <= u.hw(); ++off) {
      long c = r + off;
      if (!u.in_range(c)) continue;
      const Matrix& b = u.block(r, off);
      for (int i = 0; i < t.m; ++i)
        for (int j = 0; j < t.m; ++j) {
          Complex e = b(i, j);
          if (e == Complex(0, 0)) continue;
          std::snprintf(buf, sizeof buf, "%" PRId64 " %" PRId64 " %.17g %.17g\n",
                        std::int64_t(u.row0(r)) + i, std::int64_t(u.row0(c)) + j, e.real(),
                        e.imag());
          out += buf;
        }
    }
  return out;
}

}  // namespace cmv
