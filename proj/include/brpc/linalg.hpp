#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace brpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a matrix that must be positive definite is not, or a
/// factorization fails beyond repair.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Cholesky factor of a symmetric positive-definite matrix. All PD solves in
/// the library go through this; explicit inverses appear only in diagnostics.
class PdFactor {
 public:
  explicit PdFactor(const Matrix& m) : llt_(m) {
    if (llt_.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      throw NumericalError("PD factorization failed: eigenvalue range [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }

  template <typename Derived>
  auto solve(const Eigen::MatrixBase<Derived>& rhs) const {
    return llt_.solve(rhs.derived()).eval();
  }

  double log_det() const {
    return 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  /// x' M^{-1} x
  double quad_form_inv(const Vector& x) const {
    return x.dot(llt_.solve(x));
  }

  Matrix inverse(Eigen::Index n) const {
    return llt_.solve(Matrix::Identity(n, n));
  }

 private:
  Eigen::LLT<Matrix> llt_;
};

/// Symmetrize, then clip small negative eigenvalues to zero. Negative
/// eigenvalues larger than tol_scale * trace are treated as corruption.
inline Matrix psd_repair(const Matrix& m, double tol_scale = 1e-6) {
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& evals = es.eigenvalues();
  const double lambda_min = evals.minCoeff();
  if (lambda_min >= 0.0) return sym;
  const double trace = std::max(sym.trace(), 0.0);
  const double tol = tol_scale * std::max(trace, 1e-300);
  if (-lambda_min > tol) {
    throw NumericalError("PSD repair: eigenvalue " + std::to_string(lambda_min) +
                         " below tolerance -" + std::to_string(tol));
  }
  Vector clipped = evals.cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

inline double log_sum_exp(const Vector& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace brpc
