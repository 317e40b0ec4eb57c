#include "discbench/numerics.hpp"

#include "discbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace discbench {

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

SymEigResult sym_eig(const Matrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("sym_eig: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  if (m.size() == 0) throw DimensionError("sym_eig: empty matrix");
  if (!is_symmetric(m)) throw DimensionError("sym_eig: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("sym_eig: eigensolver did not converge");

  // Eigen returns ascending order; reverse both in lockstep.
  SymEigResult out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SvdResult thin_svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw DimensionError("thin_svd: empty matrix");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = svd.matrixU();
  out.singular = svd.singularValues();
  out.vt = svd.matrixV().transpose();
  return out;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw DimensionError("solve_spd: coefficient matrix not square");
  if (a.rows() != b.rows())
    throw DimensionError("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(a.rows()));
  if (!is_symmetric(a)) throw DimensionError("solve_spd: coefficient matrix not symmetric");

  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
    throw SingularityError("solve_spd: matrix is not positive definite within tolerance");
  return llt.solve(b);
}

void canonicalize_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index arg = 0;
    columns.col(j).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, j) < 0) columns.col(j) = -columns.col(j);
  }
}

Matrix orthonormal_basis(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

double max_principal_angle_sin(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("principal angles: ambient dimensions differ");
  const Matrix qa = orthonormal_basis(a);
  const Matrix qb = orthonormal_basis(b);
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  if (residual.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::min(1.0, svd.singularValues()(0));
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  return std::asin(max_principal_angle_sin(a, b));
}

}  // namespace discbench
