#include "glearn/linalg.hpp"

#include "glearn/errors.hpp"

namespace glearn {

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::LLT<MatrixXd> checked_llt(const MatrixXd& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(what + ": matrix is not square");
  }
  require_finite(m, what);
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericError(what + ": matrix is not positive definite (n=" +
                       std::to_string(m.rows()) + ", min diag=" +
                       std::to_string(m.diagonal().minCoeff()) + ")");
  }
  return llt;
}

double log_det(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void require_shape(const MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_size(const VectorXd& v, Eigen::Index n, const std::string& what) {
  if (v.size() != n) {
    throw ShapeError(what + ": expected length " + std::to_string(n) + ", got " +
                     std::to_string(v.size()));
  }
}

void require_finite(const MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw NumericError(what + ": non-finite entry");
}

double max_abs_diff(const MatrixXd& a, const MatrixXd& b) {
  if (a.size() == 0 && b.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace glearn
