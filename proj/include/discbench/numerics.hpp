#pragma once

// Dense linear algebra used across the library. Matrices are Eigen dense
// double-precision objects; the free functions below pin the contracts
// (ordering, tolerances, error behaviour) that callers rely on, independent
// of the Eigen decomposition that backs them.

#include <Eigen/Dense>

#include <vector>

namespace discbench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct SymEigResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // one unit-norm column per eigenvalue
};

struct SvdResult {
  Matrix u;           // rows x k
  Vector singular;    // k = min(rows, cols), non-negative, descending
  Matrix vt;          // k x cols
};

/// Eigendecomposition of a symmetric matrix, eigenvalues in descending order.
/// Throws DimensionError for non-square input or asymmetry beyond 1e-9
/// relative to the largest entry.
SymEigResult sym_eig(const Matrix& m);

/// Thin SVD, singular values descending. Throws DimensionError on empty input.
SvdResult thin_svd(const Matrix& m);

/// Solves a x = b for symmetric positive-definite a. Throws SingularityError
/// when the reciprocal condition estimate falls below 1e-12.
Matrix solve_spd(const Matrix& a, const Matrix& b);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-9);
bool all_finite(const Matrix& m);

/// Flips each column so that its largest-magnitude entry is positive.
void canonicalize_signs(Matrix& columns);

/// Orthonormal basis for the column span of `m` (Householder QR).
Matrix orthonormal_basis(const Matrix& m);

/// Sine of the largest principal angle between the column spans of a and b.
/// Computed as ||(I - Qa Qa^T) Qb||_2 so small angles keep full precision.
double max_principal_angle_sin(const Matrix& a, const Matrix& b);

/// Largest principal angle in radians.
double max_principal_angle(const Matrix& a, const Matrix& b);

}  // namespace discbench
