#include "bofp/linalg.hpp"

#include <lapacke.h>

#include <string>

#include "bofp/error.hpp"

namespace bofp::linalg {

SymmetricEigen symmetric_eigen(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("symmetric_eigen needs a square matrix");
  SymmetricEigen out;
  if (n == 0) return out;
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                         a.data(), static_cast<lapack_int>(n), w.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed with info = " + std::to_string(info));
  }
  // LAPACK returns ascending order.
  out.values = w.reverse();
  out.vectors = a.rowwise().reverse();
  return out;
}

void canonicalize_signs(Eigen::MatrixXd& vectors, double rel_tol) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > rel_tol * scale) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
  }
}

}  // namespace bofp::linalg
