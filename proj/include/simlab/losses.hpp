#pragma once

#include <Eigen/Dense>

#include "simlab/covariance.hpp"
#include "simlab/sim_config.hpp"

namespace simlab {

// x_hat^{(v)} = sum_p v_p mu_p e_p, rotated when the config is rotated.
Eigen::VectorXd test_point(const TestIndex& v, const SimConfig& config);

// The canonical OOD test point (v = all ones).
Eigen::VectorXd test_point(const SimConfig& config);

// 1/2 || (W - I) A^{1/2} ||_F^2, evaluated as 1/2 tr((W-I) A (W-I)^T).
double population_loss(const Eigen::MatrixXd& W, const CovarianceSpectrum& A);

// 1/2 || W z - z ||^2.
double point_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& z);

}  // namespace simlab
