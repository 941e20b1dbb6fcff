#pragma once

#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace glearn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd symmetrize(const MatrixXd& m);

/// Cholesky factorization that throws NumericError (tagged with `what`) when
/// the matrix is not numerically positive definite.
Eigen::LLT<MatrixXd> checked_llt(const MatrixXd& m, const std::string& what);

/// log|A| from a Cholesky factor.
double log_det(const Eigen::LLT<MatrixXd>& llt);

/// Throws ShapeError unless `m` is rows x cols.
void require_shape(const MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what);
void require_size(const VectorXd& v, Eigen::Index n, const std::string& what);

/// Throws NumericError if any entry is NaN or infinite.
void require_finite(const MatrixXd& m, const std::string& what);

double max_abs_diff(const MatrixXd& a, const MatrixXd& b);

}  // namespace glearn
