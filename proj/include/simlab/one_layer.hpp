#pragma once

#include <Eigen/Dense>

#include "simlab/covariance.hpp"
#include "simlab/trajectory.hpp"

namespace simlab {

// Output of the one-layer closed form split into its growth and noise parts.
struct OutputDecomposition {
  Eigen::VectorXd growth;
  Eigen::VectorXd noise;
  Eigen::VectorXd total;  // growth + noise
};

// Closed-form gradient-flow solution W(t) for dW/dt = -(W - I) A with
// A = diag(a): column j relaxes toward e_j at rate a_j; columns with
// a_j = 0 stay frozen at W0 (0 * 0^-1 = 0 convention).
// Rejects empirical spectra.
Eigen::MatrixXd analytic_solution_matrix(const Eigen::MatrixXd& W0,
                                         const CovarianceSpectrum& a, double t);

// f(W(t); z) with per-coordinate growth term [1 - exp(-a_k t)] z_k and
// noise term sum_i exp(-a_i t) w_{k,i}(0) z_i. total == W(t) z exactly.
OutputDecomposition analytic_output(const Eigen::MatrixXd& W0,
                                    const CovarianceSpectrum& a,
                                    const Eigen::VectorXd& z, double t);

struct EulerResult {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> weights;
};

// Explicit-Euler integration of dW/dt = -(W - I) A. Accepts general
// symmetric A (empirical mode). Requires step * lambda_max(A) < 1.
// Records every record_stride-th state plus the terminal one.
EulerResult euler_reference(const Eigen::MatrixXd& W0, const CovarianceSpectrum& A,
                            double step, double horizon, long record_stride = 1);

// Time at which the growth term reaches rho * z_k: -ln(1 - rho) / a_k.
// Returns +infinity for a_k = 0 (direction never converges).
double time_to_fraction(double a_k, double rho);

// Uniform-grid sampling of the closed form, with losses and outputs at x_hat.
Trajectory sample_analytic_trajectory(const Eigen::MatrixXd& W0,
                                      const CovarianceSpectrum& a,
                                      const Eigen::VectorXd& x_hat, double t_max,
                                      double dt);

}  // namespace simlab
