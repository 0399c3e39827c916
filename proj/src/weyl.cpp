#include "cmv/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "cmv/herglotz.hpp"
#include "cmv/linalg.hpp"

namespace cmv {

namespace {

Matrix rinv_mul(const Matrix& a, const Matrix& b) {  // a * b^{-1}
  Eigen::FullPivLU<Matrix> lu(b.adjoint());
  require(lu.isInvertible(), Err::PivotSingular, "right factor is singular");
  return lu.solve(a.adjoint()).adjoint();
}

Matrix linv_mul(const Matrix& a, const Matrix& b) {  // a^{-1} * b
  Eigen::FullPivLU<Matrix> lu(a);
  require(lu.isInvertible(), Err::PivotSingular, "left factor is singular");
  return lu.solve(b);
}

struct DefectPair {
  Matrix rho, rho_t, rho_inv, rho_t_inv;
};

DefectPair defects(const Matrix& alpha) {
  DefectPair d;
  d.rho = rho(alpha);
  d.rho_t = rho_tilde(alpha);
  d.rho_inv = d.rho.inverse();
  d.rho_t_inv = d.rho_t.inverse();
  return d;
}

}  // namespace

WeylQuad generate_quad(const VerblunskySequence& seq, Complex z, long k0, long k_lo, long k_hi) {
  require(k_lo <= k0 && k0 <= k_hi, Err::BadRange, "base site must lie in the quad range");
  require(std::abs(z) > 0, Err::BadRange, "spectral parameter must be nonzero");
  WeylQuad quad;
  quad.m = seq.m();
  quad.k_lo = k_lo;
  quad.k_hi = k_hi;
  quad.k0 = k0;
  quad.z = z;
  const int m = quad.m;
  const size_t n = size_t(k_hi - k_lo + 1);
  quad.p.assign(n, Matrix());
  quad.q.assign(n, Matrix());
  quad.r.assign(n, Matrix());
  quad.s.assign(n, Matrix());

  Matrix id = Matrix::Identity(m, m);
  auto at = [&](std::vector<Matrix>& v, long k) -> Matrix& { return v[size_t(k - k_lo)]; };
  if (k0 % 2 == 0) {
    at(quad.p, k0) = id;
    at(quad.r, k0) = id;
    at(quad.q, k0) = -id;
    at(quad.s, k0) = id;
  } else {
    at(quad.p, k0) = z * id;
    at(quad.r, k0) = id;
    at(quad.q, k0) = z * id;
    at(quad.s, k0) = -id;
  }

  auto step_up = [&](std::vector<Matrix>& pv, std::vector<Matrix>& rv, long j) {
    // fill site j+1 from site j
    const Matrix a = seq.alpha(j + 1);
    DefectPair d = defects(a);
    if (((j % 2) + 2) % 2 == 0) {  // crossing the z-scaled pair (j, j+1)
      at(pv, j + 1) = d.rho_t_inv * (z * at(rv, j) + a * at(pv, j));
      at(rv, j + 1) = (d.rho * at(pv, j) + a.adjoint() * at(pv, j + 1)) / z;
    } else {  // crossing the plain pair (j, j+1)
      at(rv, j + 1) = d.rho_t_inv * (at(pv, j) + a * at(rv, j));
      at(pv, j + 1) = d.rho * at(rv, j) + a.adjoint() * at(rv, j + 1);
    }
  };
  auto step_down = [&](std::vector<Matrix>& pv, std::vector<Matrix>& rv, long j) {
    // fill site j-1 from site j
    const Matrix a = seq.alpha(j);
    DefectPair d = defects(a);
    if (((j % 2) + 2) % 2 == 0) {  // pair (j-1, j) is plain
      at(rv, j - 1) = d.rho_inv * (at(pv, j) - a.adjoint() * at(rv, j));
      at(pv, j - 1) = -a * at(rv, j - 1) + d.rho_t * at(rv, j);
    } else {  // pair (j-1, j) is z-scaled
      at(pv, j - 1) = d.rho_inv * (z * at(rv, j) - a.adjoint() * at(pv, j));
      at(rv, j - 1) = (-a * at(pv, j - 1) + d.rho_t * at(pv, j)) / z;
    }
  };

  for (long j = k0; j < k_hi; ++j) {
    step_up(quad.p, quad.r, j);
    step_up(quad.q, quad.s, j);
  }
  for (long j = k0; j > k_lo; --j) {
    step_down(quad.p, quad.r, j);
    step_down(quad.q, quad.s, j);
  }
  return quad;
}

double quad_residual(const CmvTruncation& t, const WeylQuad& quad) {
  require(t.m == quad.m, Err::SizeMismatch, "block sizes differ");
  require(t.k_lo <= quad.k_lo && quad.k_hi <= t.k_hi, Err::BadRange,
          "quad range must sit inside the truncation");
  double worst = 0;
  auto band_row = [&](const BlockBand& band, const std::vector<Matrix>& v, long k) {
    Matrix acc = Matrix::Zero(quad.m, quad.m);
    for (int off = -band.hw(); off <= band.hw(); ++off) {
      long kk = k + off;
      if (kk < quad.k_lo || kk > quad.k_hi) continue;
      acc += band.block(k, off) * v[size_t(kk - quad.k_lo)];
    }
    return acc;
  };
  for (long k = quad.k_lo; k <= quad.k_hi; ++k) {
    // rows of the z-scaled factor are exact on the whole truncation; rows of
    // the plain factor are modified at the two ends
    double scale = 1 + quad.P(k).norm() + quad.R(k).norm() + quad.Q(k).norm() + quad.S(k).norm();
    long partner = (((k % 2) + 2) % 2 == 0) ? k + 1 : k - 1;
    if (partner >= quad.k_lo && partner <= quad.k_hi) {
      worst = std::max(worst, (band_row(t.w, quad.p, k) - quad.z * quad.R(k)).norm() / scale);
      worst = std::max(worst, (band_row(t.w, quad.q, k) - quad.z * quad.S(k)).norm() / scale);
    }
    long vpartner = (((k % 2) + 2) % 2 == 0) ? k - 1 : k + 1;
    if (k > t.k_lo && k < t.k_hi && vpartner >= quad.k_lo && vpartner <= quad.k_hi) {
      worst = std::max(worst, (band_row(t.v, quad.r, k) - quad.P(k)).norm() / scale);
      worst = std::max(worst, (band_row(t.v, quad.s, k) - quad.Q(k)).norm() / scale);
    }
  }
  return worst;
}

Matrix riccati_step_down(const Matrix& alpha_k, Complex z, const Matrix& phi_k) {
  DefectPair d = defects(alpha_k);
  Matrix lhs = phi_k * d.rho_t_inv * alpha_k - d.rho_inv;
  Matrix rhs = z * (d.rho_inv * alpha_k.adjoint() - phi_k * d.rho_t_inv);
  return linv_mul(lhs, rhs);
}

double riccati_down_residual(const Matrix& alpha_k, Complex z, const Matrix& phi_km1,
                             const Matrix& phi_k) {
  DefectPair d = defects(alpha_k);
  Matrix res = phi_k * d.rho_t_inv * alpha_k * phi_km1 + z * phi_k * d.rho_t_inv -
               d.rho_inv * phi_km1 - z * d.rho_inv * alpha_k.adjoint();
  return res.norm();
}

Matrix riccati_step_up_minus(const Matrix& alpha_k, Complex z, const Matrix& g_km1) {
  DefectPair d = defects(alpha_k);
  Matrix num = z * d.rho_t_inv * g_km1 + d.rho_t_inv * alpha_k;
  Matrix den = z * d.rho_inv * alpha_k.adjoint() * g_km1 + d.rho_inv;
  return rinv_mul(num, den);
}

double riccati_up_residual(const Matrix& alpha_k, Complex z, const Matrix& g_km1,
                           const Matrix& g_k) {
  DefectPair d = defects(alpha_k);
  Matrix res = g_k * (z * d.rho_inv * alpha_k.adjoint() * g_km1 + d.rho_inv) -
               (z * d.rho_t_inv * g_km1 + d.rho_t_inv * alpha_k);
  return res.norm();
}

Matrix schur_plus_fixed(const VerblunskySequence& seq, Complex z, long k, const Matrix& seed,
                        long depth) {
  Matrix phi = seed;
  for (long j = k + depth; j > k; --j) phi = riccati_step_down(seq.alpha(j), z, phi);
  return phi;
}

Matrix schur_minus_inv_fixed(const VerblunskySequence& seq, Complex z, long k, const Matrix& seed,
                             long depth) {
  Matrix g = seed;
  for (long j = k - depth + 1; j <= k; ++j) g = riccati_step_up_minus(seq.alpha(j), z, g);
  return g;
}

namespace {

Matrix schur_iterate(const VerblunskySequence& seq, Complex z, long k, const SchurOptions& opt,
                     bool plus) {
  const int m = seq.m();
  Matrix zero = Matrix::Zero(m, m);
  if (seq.extension() == ExtensionKind::Zero) {
    if (plus) {
      long top = std::max(k, seq.k_max());
      return schur_plus_fixed(seq, z, k, zero, top - k);
    }
    long bottom = std::min(k, seq.k_min() - 1);
    return schur_minus_inv_fixed(seq, z, k, zero, k - bottom);
  }
  require(std::abs(z) < 1 - 1e-9, Err::BadRange,
          "iterative schur evaluation needs a point inside the disk");
  long depth = opt.start_depth;
  Matrix prev = plus ? schur_plus_fixed(seq, z, k, zero, depth)
                     : schur_minus_inv_fixed(seq, z, k, zero, depth);
  while (depth <= opt.max_depth) {
    depth *= 2;
    Matrix cur = plus ? schur_plus_fixed(seq, z, k, zero, depth)
                      : schur_minus_inv_fixed(seq, z, k, zero, depth);
    if ((cur - prev).norm() < opt.tol) return cur;
    prev = cur;
  }
  fail(Err::NoConvergence, "schur iteration did not settle within the depth budget");
}

}  // namespace

Matrix schur_plus(const VerblunskySequence& seq, Complex z, long k, const SchurOptions& opt) {
  return schur_iterate(seq, z, k, opt, true);
}

Matrix schur_minus_inv(const VerblunskySequence& seq, Complex z, long k, const SchurOptions& opt) {
  return schur_iterate(seq, z, k, opt, false);
}

MPair m_functions(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt) {
  MPair out;
  out.m_plus = schur_to_cayley(schur_plus(seq, z, k0, opt));
  out.m_minus = schur_to_cayley_minus(schur_minus_inv(seq, z, k0, opt));
  return out;
}

Matrix phi11(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt) {
  Matrix fp = schur_plus(seq, z, k0, opt);
  Matrix g = schur_minus_inv(seq, z, k0, opt);
  return (((k0 % 2) + 2) % 2 == 1) ? Matrix(g * fp) : Matrix(fp * g);
}

Matrix m11_weyl(const VerblunskySequence& seq, Complex z, long k0, const SchurOptions& opt) {
  return schur_to_cayley(phi11(seq, z, k0, opt));
}

Matrix m11_truncation(const CmvTruncation& t, long k0, Complex z) {
  ResolventSolver rs(t);
  return m11_truncation(rs, t, k0, z);
}

Matrix m11_truncation(ResolventSolver& rs, const CmvTruncation& t, long k0, Complex z) {
  require(k0 >= t.k_lo && k0 <= t.k_hi, Err::BadRange, "base site outside the truncation");
  const int m = t.m;
  rs.set_z(z);
  Matrix rhs = Matrix::Zero(t.dim(), m);
  rhs.block(t.row0(k0), 0, m, m) = Matrix::Identity(m, m);
  Matrix sol = rs.solve_block(rhs);
  return Matrix::Identity(m, m) + 2.0 * z * sol.block(t.row0(k0), 0, m, m);
}

Matrix resolvent_entry_weyl(const VerblunskySequence& seq, Complex z, long k0, long k, long kp,
                            const SchurOptions& opt) {
  const long lo = std::min({k, kp, k0});
  const long hi = std::max({k, kp, k0});
  const Complex w = Complex(1, 0) / std::conj(z);
  WeylQuad qz = generate_quad(seq, z, k0, lo, hi);
  WeylQuad qw = generate_quad(seq, w, k0, lo, hi);
  MPair mp = m_functions(seq, z, k0, opt);
  Matrix wron = mp.m_plus - mp.m_minus;
  const bool lower_branch = (k < kp) || (k == kp && (((k % 2) + 2) % 2 == 1));
  Matrix left, right;
  if (lower_branch) {
    left = qz.Q(k) + qz.P(k) * mp.m_minus;
    right = qw.Q(kp).adjoint() - mp.m_plus * qw.P(kp).adjoint();
  } else {
    left = qz.Q(k) + qz.P(k) * mp.m_plus;
    right = qw.Q(kp).adjoint() - mp.m_minus * qw.P(kp).adjoint();
  }
  return (0.5 / z) * left * linv_mul(wron, right);
}

}  // namespace cmv
