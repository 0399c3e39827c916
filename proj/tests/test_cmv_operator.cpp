#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cmv/cmv_operator.hpp"
#include "cmv/linalg.hpp"
#include "cmv/random.hpp"

using namespace cmv;

namespace {

VerblunskySequence random_window_seq(Rng& rng, int m, long lo, long hi, double max_norm) {
  std::vector<Matrix> window;
  for (long k = lo; k <= hi; ++k) window.push_back(rng.contraction(m, max_norm));
  return VerblunskySequence::windowed(m, lo, std::move(window));
}

// Interior entry of the doubly infinite operator in closed form.
Matrix entry_oracle(const VerblunskySequence& seq, long r, long c) {
  const int m = seq.m();
  auto a = [&](long k) { return seq.alpha(k); };
  if (r % 2 == 0) {  // even rows reach columns r-2..r+1
    if (c == r - 2) return Matrix(rho(a(r)) * rho(a(r - 1)));
    if (c == r - 1) return Matrix(rho(a(r)) * a(r - 1).adjoint());
    if (c == r) return Matrix(-a(r).adjoint() * a(r + 1));
    if (c == r + 1) return Matrix(a(r).adjoint() * rho_tilde(a(r + 1)));
  } else {  // odd rows reach columns r-1..r+2
    if (c == r - 1) return Matrix(-a(r + 1) * rho(a(r)));
    if (c == r) return Matrix(-a(r + 1) * a(r).adjoint());
    if (c == r + 1) return Matrix(-rho_tilde(a(r + 1)) * a(r + 2));
    if (c == r + 2) return Matrix(rho_tilde(a(r + 1)) * rho_tilde(a(r + 2)));
  }
  return Matrix::Zero(m, m);
}

}  // namespace

TEST_CASE("range snapping keeps parity alignment") {
  auto seq = VerblunskySequence::free_seq(1);
  auto t = build_truncation(seq, -3, 8);
  CHECK(t.k_lo == -4);
  CHECK(t.k_hi == 9);
  CHECK(t.n_sites() % 2 == 0);
}

TEST_CASE("free truncation has zero diagonal and swap structure") {
  auto seq = VerblunskySequence::free_seq(2);
  auto t = build_truncation(seq, 0, 15);
  for (long k = t.k_lo; k <= t.k_hi; ++k) CHECK(t.u.block(k, 0).norm() < 1e-15);
  CHECK(t.u.gram_defect() < 1e-12);
}

TEST_CASE("borg half-circle truncation has constant interior diagonal") {
  ArcSpec arc(PI / 2, 3 * PI / 2);
  auto seq = borg_sequence(1, arc, Matrix::Identity(1, 1));
  auto t = build_truncation(seq, -8, 7);
  for (long k = t.k_lo + 1; k <= t.k_hi - 1; ++k)
    CHECK(std::abs(t.u.block(k, 0)(0, 0) - Complex(-0.5, 0)) < 1e-13);
}

TEST_CASE("interior entries match the closed forms") {
  Rng rng(211);
  for (int trial = 0; trial < 100; ++trial) {
    int m = rng.uniform_int(1, 3);
    auto seq = random_window_seq(rng, m, -14, 13, 0.9);
    auto t = build_truncation(seq, -12, 11);
    for (long r = t.k_lo + 1; r <= t.k_hi - 1; ++r)
      for (long c = std::max(r - 2, t.k_lo); c <= std::min(r + 2, t.k_hi); ++c) {
        Matrix got = t.u.block(r, int(c - r));
        CHECK((got - entry_oracle(seq, r, c)).norm() < 1e-12);
      }
  }
}

TEST_CASE("factorization product matches dense multiplication") {
  Rng rng(223);
  auto seq = random_window_seq(rng, 2, -10, 9, 0.9);
  auto t = build_truncation(seq, -8, 7);
  Matrix dense_u = t.v.to_dense() * t.w.to_dense();
  CHECK((t.u.to_dense() - dense_u).norm() < 1e-13);
}

TEST_CASE("assembled truncations are unitary") {
  Rng rng(227);
  for (auto [m, sites] : std::vector<std::pair<int, long>>{{1, 64}, {2, 256}, {4, 2048}}) {
    auto seq = random_window_seq(rng, m, 0, sites + 1, 0.95);
    auto t = build_truncation(seq, 1, sites - 2);
    CHECK(t.u.gram_defect() < 1e-10);
    CHECK(t.v.gram_defect() < 1e-11);
    CHECK(t.w.gram_defect() < 1e-11);
  }
}

TEST_CASE("replaced coefficients at the cut sites are never read") {
  Rng rng(229);
  auto seq = random_window_seq(rng, 2, -10, 13, 0.9);
  auto t1 = build_truncation(seq, -8, 11);
  auto modified = seq;
  modified.set_override(-8, rng.contraction(2, 0.5));   // cut site k_lo
  modified.set_override(12, rng.contraction(2, 0.5));   // cut site k_hi + 1
  auto t2 = build_truncation(modified, -8, 11);
  CHECK((t1.u.to_dense() - t2.u.to_dense()).norm() == 0.0);
}

TEST_CASE("apply agrees with dense and inverts through the adjoint") {
  Rng rng(233);
  auto seq = random_window_seq(rng, 3, -6, 7, 0.9);
  auto t = build_truncation(seq, -4, 5);
  Matrix dense = t.u.to_dense();
  Vector x = rng.gaussian(t.dim(), 1).col(0);
  CHECK((apply(t, ApplyWhich::U, x) - dense * x).norm() < 1e-12 * x.norm());
  CHECK((apply(t, ApplyWhich::UStar, x) - dense.adjoint() * x).norm() < 1e-12 * x.norm());
  Vector back = apply(t, ApplyWhich::UStar, apply(t, ApplyWhich::U, x));
  CHECK((back - x).norm() < 1e-12 * x.norm());
}

TEST_CASE("single application of W only touches one pair of sites") {
  auto seq = VerblunskySequence::free_seq(1);
  auto t = build_truncation(seq, 0, 9);
  Vector x = Vector::Zero(t.dim());
  x(4) = 1.0;  // site 4, even: W couples it with site 5
  Vector y = apply(t, ApplyWhich::W, x);
  for (Eigen::Index i = 0; i < t.dim(); ++i)
    if (i != 4 && i != 5) CHECK(std::abs(y(i)) < 1e-15);
}

TEST_CASE("resolvent at zero is the adjoint") {
  Rng rng(239);
  auto seq = random_window_seq(rng, 2, -6, 7, 0.9);
  auto t = build_truncation(seq, -4, 5);
  Vector rhs = rng.gaussian(t.dim(), 1).col(0);
  Vector y = resolvent_solve(t, Complex(0, 0), rhs);
  CHECK((y - apply(t, ApplyWhich::UStar, rhs)).norm() < 1e-13 * rhs.norm());
}

TEST_CASE("resolvent solves against a dense oracle") {
  Rng rng(241);
  auto seq = random_window_seq(rng, 2, -8, 9, 0.9);
  auto t = build_truncation(seq, -6, 7);
  Matrix dense = t.u.to_dense();
  for (Complex z : {Complex(0.5, 0), Complex(-0.3, 0.4), Complex(1.7, 0.2)}) {
    Vector rhs = rng.gaussian(t.dim(), 1).col(0);
    Matrix shifted = dense - z * Matrix::Identity(t.dim(), t.dim());
    Vector want = shifted.partialPivLu().solve(rhs);
    Vector got = resolvent_solve(t, z, rhs);
    CHECK((got - want).norm() < 1e-9 * want.norm());
    CHECK((t.u.apply(got) - z * got - rhs).norm() < 1e-10 * rhs.norm());
  }
}

TEST_CASE("resolvent rejects points hugging the unit circle") {
  auto seq = VerblunskySequence::free_seq(1);
  auto t = build_truncation(seq, 0, 9);
  Vector rhs = Vector::Ones(t.dim());
  CHECK_THROWS_AS(resolvent_solve(t, Complex(1.0 + 1e-8, 0), rhs), Error);
  try {
    resolvent_solve(t, std::polar(1.0 - 1e-9, 2.0), rhs);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NearUnitCircle);
  }
}

TEST_CASE("reusable solver matches the one-shot path") {
  Rng rng(251);
  auto seq = random_window_seq(rng, 2, -6, 7, 0.9);
  auto t = build_truncation(seq, -4, 5);
  ResolventSolver solver(t);
  for (Complex z : {Complex(0.4, 0.1), Complex(-0.2, -0.5)}) {
    solver.set_z(z);
    Vector rhs = rng.gaussian(t.dim(), 1).col(0);
    CHECK((solver.solve(rhs) - resolvent_solve(t, z, rhs)).norm() < 1e-11 * rhs.norm());
  }
}

TEST_CASE("diagonal moments vanish in the free case") {
  auto seq = VerblunskySequence::free_seq(2);
  auto t = build_truncation(seq, -20, 19);
  for (int p = 1; p <= 6; ++p) CHECK(diagonal_moment(t, 0, p).norm() < 1e-14);
  CHECK((diagonal_moment(t, 0, 0) - Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("first diagonal moment matches the coefficient product") {
  Rng rng(257);
  for (int m : {1, 2, 3}) {
    auto seq = random_window_seq(rng, m, -12, 13, 0.9);
    auto t = build_truncation(seq, -10, 11);
    for (long k0 : {0L, 1L}) {
      Matrix got = diagonal_moment(t, k0, 1);
      // (U^*)(k0,k0) = (U(k0,k0))^*
      Matrix want = entry_oracle(seq, k0, k0).adjoint();
      CHECK((got - want).norm() < 1e-13);
    }
  }
}

TEST_CASE("higher moments match the dense power oracle") {
  Rng rng(263);
  auto seq = random_window_seq(rng, 2, -16, 17, 0.9);
  auto t = build_truncation(seq, -14, 13);
  Matrix dense = t.u.to_dense();
  Matrix pw = Matrix::Identity(t.dim(), t.dim());
  for (int p = 1; p <= 3; ++p) {
    pw = dense.adjoint() * pw;
    Matrix want = pw.block(t.row0(0), t.row0(0), 2, 2);
    CHECK((diagonal_moment(t, 0, p) - want).norm() < 1e-12);
  }
}

TEST_CASE("moments remain stable when the truncation grows") {
  Rng rng(269);
  auto seq = random_window_seq(rng, 2, -40, 41, 0.9);
  auto small = build_truncation(seq, -14, 13);
  auto large = build_truncation(seq, -30, 29);
  for (int p = 0; p <= 5; ++p)
    CHECK((diagonal_moment(small, 0, p) - diagonal_moment(large, 0, p)).norm() < 1e-14);
}

TEST_CASE("moment clearance is enforced") {
  auto seq = VerblunskySequence::free_seq(1);
  auto t = build_truncation(seq, 0, 9);
  CHECK_THROWS_AS(diagonal_moment(t, 4, 3), Error);
  try {
    diagonal_moment(t, 4, 3);
  } catch (const Error& e) {
    CHECK(e.code() == Err::TooCloseToBoundary);
  }
}

TEST_CASE("conjugated sequences give unitarily equivalent truncations") {
  Rng rng(271);
  for (int m : {1, 2, 3}) {
    auto seq = random_window_seq(rng, m, -8, 9, 0.9);
    Matrix g1 = rng.unitary(m), g2 = rng.unitary(m);
    auto conj = conjugate_sequence(seq, g1, g2);
    Matrix bd = g1 * g2.adjoint();
    auto ta = build_truncation(seq, -6, 5);
    auto tb = build_truncation(conj, -6, 5, bd, bd);
    // Gamma_1 carries g1 on odd sites and g2 on even sites.
    Matrix gamma1 = Matrix::Zero(ta.dim(), ta.dim());
    for (long k = ta.k_lo; k <= ta.k_hi; ++k)
      gamma1.block(ta.row0(k), ta.row0(k), m, m) = ((k % 2 + 2) % 2 == 1) ? g1 : g2;
    Matrix want = gamma1 * ta.u.to_dense() * gamma1.adjoint();
    CHECK((tb.u.to_dense() - want).norm() < 1e-12);
  }
}

TEST_CASE("coordinate export round trips against the dense matrix") {
  Rng rng(277);
  auto seq = random_window_seq(rng, 2, -6, 7, 0.9);
  auto t = build_truncation(seq, -4, 5);
  Matrix dense = t.u.to_dense();
  Matrix parsed = Matrix::Zero(t.dim(), t.dim());
  std::istringstream in(export_coo(t));
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    long r, c;
    std::string sre, sim;
    ls >> r >> c >> sre >> sim;
    parsed(r, c) = Complex(std::strtod(sre.c_str(), nullptr), std::strtod(sim.c_str(), nullptr));
  }
  CHECK((parsed - dense).norm() == 0.0);  // 17 digits must round trip exactly
}
