#include "doctest.h"

#include <cmath>

#include "cmv/linalg.hpp"
#include "cmv/random.hpp"

using namespace cmv;

namespace {

// Independent exponential oracle: straight Taylor sum with argument halving,
// no shared code with the library log path.
Matrix taylor_exp(const Matrix& a) {
  int s = 0;
  double nrm = a.norm();
  while (std::ldexp(nrm, -s) > 0.25) ++s;
  Matrix b = a * std::ldexp(1.0, -s);
  const auto n = a.rows();
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

}  // namespace

TEST_CASE("hermitian square root fixes identity and scalar multiples") {
  Matrix id = Matrix::Identity(3, 3);
  CHECK(rel_err(hermitian_sqrt(id), id) < 1e-14);

  Matrix half = 0.5 * Matrix::Identity(2, 2);
  Matrix root = hermitian_sqrt(half);
  CHECK(std::abs(root(0, 0).real() - std::sqrt(0.5)) < 1e-14);
  CHECK(std::abs(root(1, 0)) < 1e-14);
}

TEST_CASE("hermitian square root re-multiplies to the input") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    int m = rng.uniform_int(1, 8);
    Matrix a = rng.hermitian_psd(m);
    Matrix b = hermitian_sqrt(a);
    CHECK((b - b.adjoint()).norm() < 1e-12 * std::max(1.0, b.norm()));
    CHECK((b * b - a).norm() < 1e-12 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("hermitian square root rejects bad inputs") {
  Matrix skew(2, 2);
  skew << Complex(0, 0), Complex(0, 1), Complex(0, 2), Complex(0, 0);
  CHECK_THROWS_AS(hermitian_sqrt(skew), Error);

  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(hermitian_sqrt(neg), Error);

  try {
    hermitian_sqrt(neg);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotPsd);
  }
}

TEST_CASE("principal log fixes identity and scalar exponentials") {
  Matrix id = Matrix::Identity(4, 4);
  CHECK(principal_log(id).norm() < 1e-13);

  Matrix a = std::exp(1.0) * Matrix::Identity(2, 2);
  CHECK(rel_err(principal_log(a), Matrix::Identity(2, 2)) < 1e-13);
}

TEST_CASE("principal log inverts the independent exponential oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int m = rng.uniform_int(1, 6);
    // ||L|| <= 1 keeps the spectrum inside the principal strip and exp(L)
    // inside the right half plane.
    Matrix log_ref = rng.gaussian(m, m);
    log_ref *= 0.9 / std::max(1.0, operator_norm(log_ref));
    Matrix a = taylor_exp(log_ref);
    Matrix log_got = principal_log(a);
    CHECK(rel_err(log_got, log_ref) < 1e-11);
  }
}

TEST_CASE("principal log round-trips through the exponential") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    int m = rng.uniform_int(1, 5);
    // Random matrix pushed into the right half plane.
    Matrix a = rng.gaussian(m, m);
    a = Matrix::Identity(m, m) * (operator_norm(a) + 0.4) + a;
    Matrix l = principal_log(a);
    CHECK(rel_err(taylor_exp(l), a) < 1e-10);
  }
}

TEST_CASE("principal log rejects spectra touching the left half plane") {
  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(principal_log(neg), Error);
  try {
    principal_log(neg);
  } catch (const Error& e) {
    CHECK(e.code() == Err::SpectrumNotInRightHalfPlane);
  }
}

TEST_CASE("operator norm matches hand values") {
  Matrix a(2, 2);
  a << Complex(3, 0), Complex(0, 0), Complex(0, 0), Complex(-4, 0);
  CHECK(std::abs(operator_norm(a) - 4.0) < 1e-13);

  Matrix rank1 = Matrix::Zero(3, 3);
  rank1(0, 2) = Complex(0, 2);
  CHECK(std::abs(operator_norm(rank1) - 2.0) < 1e-13);
}

TEST_CASE("unitary eigensystem handles degenerate identity") {
  EigenPairs ep = unitary_eig(Matrix::Identity(3, 3));
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(ep.values(j) - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(ep.angles(j)) < 1e-12);
  }
  CHECK((ep.vectors.adjoint() * ep.vectors - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("unitary eigensystem resolves a rotation against characteristic roots") {
  double t = 0.7;
  Matrix rot(2, 2);
  rot << Complex(std::cos(t), 0), Complex(-std::sin(t), 0), Complex(std::sin(t), 0),
      Complex(std::cos(t), 0);
  EigenPairs ep = unitary_eig(rot);
  // Characteristic roots of the rotation are exp(±it).
  CHECK(std::abs(ep.angles(0) - t) < 1e-12);
  CHECK(std::abs(ep.angles(1) - (TWO_PI - t)) < 1e-12);
  for (int j = 0; j < 2; ++j)
    CHECK((rot * ep.vectors.col(j) - ep.values(j) * ep.vectors.col(j)).norm() < 1e-11);
}

TEST_CASE("unitary eigensystem reconstructs random unitaries") {
  Rng rng(51);
  for (int dim : {5, 40, 257}) {
    Matrix u = rng.unitary(dim);
    EigenPairs ep = unitary_eig(u);
    Matrix recon = ep.vectors * ep.values.asDiagonal() * ep.vectors.adjoint();
    CHECK((recon - u).norm() < 1e-9);
    CHECK((ep.vectors.adjoint() * ep.vectors - Matrix::Identity(dim, dim)).norm() < 1e-10);
    for (int j = 0; j < dim; ++j) CHECK(std::abs(std::abs(ep.values(j)) - 1.0) < 1e-15);
    for (int j = 1; j < dim; ++j) CHECK(ep.angles(j) >= ep.angles(j - 1));
  }
}

TEST_CASE("unitary eigensystem splits clustered levels cleanly") {
  // Block diag: rotation by t, a double eigenvalue at exp(it), and exp(-it)
  // again; forces both stages of the cluster refinement.
  double t = 0.7;
  Rng rng(67);
  Matrix d = Matrix::Zero(5, 5);
  d(0, 0) = std::polar(1.0, t);
  d(1, 1) = std::polar(1.0, -t);
  d(2, 2) = std::polar(1.0, t);
  d(3, 3) = std::polar(1.0, t);
  d(4, 4) = std::polar(1.0, -t);
  Matrix q = rng.unitary(5);
  Matrix u = q * d * q.adjoint();
  EigenPairs ep = unitary_eig(u);
  Matrix recon = ep.vectors * ep.values.asDiagonal() * ep.vectors.adjoint();
  CHECK((recon - u).norm() < 1e-11);
  int plus = 0, minus = 0;
  for (int j = 0; j < 5; ++j) {
    if (std::abs(ep.angles(j) - t) < 1e-9) ++plus;
    if (std::abs(ep.angles(j) - (TWO_PI - t)) < 1e-9) ++minus;
  }
  CHECK(plus == 3);
  CHECK(minus == 2);
}

TEST_CASE("unitary eigensystem rejects clearly non-unitary input") {
  Matrix a = 2.0 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(unitary_eig(a), Error);
}
