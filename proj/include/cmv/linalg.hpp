#pragma once

#include <vector>

#include "cmv/types.hpp"

namespace cmv {

// Eigensystem of a unitary matrix: angles[j] in [0, 2pi) sorted ascending,
// values[j] = exp(i*angles[j]) exactly on the circle, vectors orthonormal.
struct EigenPairs {
  RealVector angles;
  Vector values;
  Matrix vectors;
};

// Square root of a Hermitian PSD matrix. Eigenvalues below -tol_psd reject,
// small negatives are clipped to zero.
Matrix hermitian_sqrt(const Matrix& a);

// Principal logarithm for matrices whose spectrum lies in the open right
// half plane. Inverse scaling-and-squaring: repeated principal square roots
// (Denman-Beavers) until close to I, then a truncated Mercator series.
Matrix principal_log(const Matrix& a);

// Matrix exponential (scaling and squaring on a Pade-free Taylor core).
// Used by certificates that re-exponentiate logs; not performance critical.
Matrix matrix_exp(const Matrix& a);

// Largest singular value.
double operator_norm(const Matrix& a);

// Spectral decomposition of a (numerically) unitary matrix. Eigenvalues are
// projected onto the circle; degenerate clusters are resolved by a staged
// simultaneous diagonalization of the commuting Hermitian parts, which keeps
// the vector system orthonormal.
EigenPairs unitary_eig(const Matrix& u);

inline double unitarity_defect(const Matrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - Matrix::Identity(n, n)).norm() / std::sqrt(double(n));
}

}  // namespace cmv
