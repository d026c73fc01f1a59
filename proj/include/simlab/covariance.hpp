#pragma once

#include <Eigen/Dense>

#include "simlab/sim_config.hpp"

namespace simlab {

// Second moment of the data distribution. TrueDiagonal holds the population
// covariance a_p = sigma_p^2 + mu_p^2 / cluster_count on the support;
// EmpiricalSymmetric holds a finite-sample estimate as a full matrix.
struct CovarianceSpectrum {
  enum class Kind { TrueDiagonal, EmpiricalSymmetric };

  Kind kind = Kind::TrueDiagonal;
  Eigen::VectorXd a;       // diagonal entries (both kinds)
  Eigen::MatrixXd matrix;  // EmpiricalSymmetric only

  int dim() const { return static_cast<int>(a.size()); }
  bool is_diagonal() const { return kind == Kind::TrueDiagonal; }
  Eigen::MatrixXd dense() const;
  double max_eigenvalue() const;

  static CovarianceSpectrum true_diagonal(Eigen::VectorXd a);
  // Validates symmetry within 1e-12 and min eigenvalue >= -1e-10.
  static CovarianceSpectrum empirical(Eigen::MatrixXd m);
};

// Population covariance of the generating process. Defined in the
// axis-aligned frame only; rotated configs are rejected.
CovarianceSpectrum build_covariance(const SimConfig& config);

}  // namespace simlab
