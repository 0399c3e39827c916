#include "cmv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmv {

const char* err_name(Err e) {
  switch (e) {
    case Err::NotHermitian: return "NotHermitian";
    case Err::NotPsd: return "NotPsd";
    case Err::SpectrumNotInRightHalfPlane: return "SpectrumNotInRightHalfPlane";
    case Err::NotUnitary: return "NotUnitary";
    case Err::NotContractive: return "NotContractive";
    case Err::NotSquare: return "NotSquare";
    case Err::SizeMismatch: return "SizeMismatch";
    case Err::BadRange: return "BadRange";
    case Err::BadArc: return "BadArc";
    case Err::BadGrid: return "BadGrid";
    case Err::NearUnitCircle: return "NearUnitCircle";
    case Err::SolveFailure: return "SolveFailure";
    case Err::TooCloseToBoundary: return "TooCloseToBoundary";
    case Err::PivotSingular: return "PivotSingular";
    case Err::NoConvergence: return "NoConvergence";
    case Err::LogDomainViolation: return "LogDomainViolation";
    case Err::ScheduleTooCoarse: return "ScheduleTooCoarse";
    case Err::BadConfig: return "BadConfig";
    case Err::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace {

void require_square(const Matrix& a, const char* who) {
  require(a.rows() == a.cols(), Err::NotSquare, who);
}

// Denman-Beavers iteration for the principal square root; valid for spectra
// off the closed negative real axis.
Matrix db_sqrt(const Matrix& a) {
  const auto n = a.rows();
  Matrix y = a;
  Matrix z = Matrix::Identity(n, n);
  double scale = std::max(1.0, a.norm());
  for (int it = 0; it < 100; ++it) {
    Matrix yi = y.inverse();
    Matrix zi = z.inverse();
    Matrix yn = 0.5 * (y + zi);
    Matrix zn = 0.5 * (z + yi);
    double step = (yn - y).norm();
    y = yn;
    z = zn;
    if (step <= 1e-15 * scale) break;
  }
  return y;
}

}  // namespace

Matrix hermitian_sqrt(const Matrix& a) {
  require_square(a, "hermitian_sqrt");
  const auto n = a.rows();
  double scale = std::max(1.0, a.norm());
  require((a - a.adjoint()).norm() <= tols().herm * scale, Err::NotHermitian, "hermitian_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(a));
  require(es.info() == Eigen::Success, Err::SolveFailure, "hermitian_sqrt eigensolve");
  RealVector lam = es.eigenvalues();
  require(lam.minCoeff() >= -tols().psd * scale, Err::NotPsd, "hermitian_sqrt");
  RealVector root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(std::max(0.0, lam(i)));
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix principal_log(const Matrix& a) {
  require_square(a, "principal_log");
  const auto n = a.rows();
  {
    Eigen::ComplexEigenSolver<Matrix> es(a, false);
    require(es.info() == Eigen::Success, Err::SolveFailure, "principal_log eigensolve");
    for (Eigen::Index i = 0; i < n; ++i)
      require(es.eigenvalues()(i).real() > 0.0, Err::SpectrumNotInRightHalfPlane,
              "principal_log");
  }
  Matrix x = a;
  int s = 0;
  const Matrix id = Matrix::Identity(n, n);
  while ((x - id).norm() > 0.25 && s < 64) {
    x = db_sqrt(x);
    ++s;
  }
  require((x - id).norm() <= 0.25, Err::NoConvergence, "principal_log square roots");
  // Mercator series on x - I; ||x - I|| <= 1/4 makes 40 terms overkill.
  Matrix y = x - id;
  Matrix pw = y;
  Matrix log_x = Matrix::Zero(n, n);
  for (int k = 1; k <= 40; ++k) {
    log_x += ((k % 2 == 1) ? 1.0 : -1.0) / double(k) * pw;
    pw = pw * y;
  }
  return std::ldexp(1.0, s) * log_x;
}

Matrix matrix_exp(const Matrix& a) {
  require_square(a, "matrix_exp");
  const auto n = a.rows();
  double nrm = a.norm();
  int s = 0;
  if (nrm > 0.5) s = int(std::ceil(std::log2(nrm / 0.5)));
  Matrix b = a * std::ldexp(1.0, -s);
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * b / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

double operator_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= 48) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

// Rotate columns [lo, lo+len) of q by the eigenbasis of the compressed
// Hermitian block of h; returns the block eigenvalues (ascending).
RealVector refine_block(Matrix& q, const Matrix& h, Eigen::Index lo, Eigen::Index len) {
  Matrix sub = q.middleCols(lo, len);
  Matrix block = herm_part(sub.adjoint() * h * sub);
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  q.middleCols(lo, len) = sub * es.eigenvectors();
  return es.eigenvalues();
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> chain_clusters(const RealVector& v,
                                                                  double tau) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index n = v.size();
  Eigen::Index lo = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || v(i) - v(i - 1) > tau) {
      out.emplace_back(lo, i - lo);
      lo = i;
    }
  }
  return out;
}

}  // namespace

EigenPairs unitary_eig(const Matrix& u) {
  require_square(u, "unitary_eig");
  const auto n = u.rows();
  require(unitarity_defect(u) <= tols().unitary, Err::NotUnitary, "unitary_eig");

  // U = C + iS with commuting Hermitian C, S; staged simultaneous
  // diagonalization. The cluster width trades residual against solver mixing
  // between near-degenerate levels; the later stages undo first-stage mixing.
  const double tau = 3e-6;
  Matrix c = herm_part(u);
  Matrix s = imag_part(u);
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  require(es.info() == Eigen::Success, Err::SolveFailure, "unitary_eig eigensolve");
  Matrix q = es.eigenvectors();
  RealVector cvals = es.eigenvalues();

  for (auto [lo, len] : chain_clusters(cvals, tau)) {
    if (len < 2) continue;
    RealVector svals = refine_block(q, s, lo, len);
    for (auto [slo, slen] : chain_clusters(svals, tau)) {
      if (slen < 2) continue;
      refine_block(q, c, lo + slo, slen);
    }
  }

  Vector values(n);
  RealVector angles(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Complex lam = q.col(j).dot(u * q.col(j));  // dot conjugates the left factor
    double mod = std::abs(lam);
    require(mod > 0.5, Err::SolveFailure, "unitary_eig eigenvalue collapsed");
    values(j) = lam / mod;
    angles(j) = wrap_angle(std::arg(values(j)));
  }

  std::vector<Eigen::Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return angles(a) < angles(b); });
  EigenPairs out;
  out.angles.resize(n);
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.angles(j) = angles(perm[size_t(j)]);
    out.values(j) = values(perm[size_t(j)]);
    out.vectors.col(j) = q.col(perm[size_t(j)]);
  }
  return out;
}

}  // namespace cmv
