#include "simlab/one_layer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "simlab/losses.hpp"

namespace simlab {

namespace {
void require_diagonal(const CovarianceSpectrum& a, const char* who) {
  if (!a.is_diagonal())
    throw std::invalid_argument(std::string(who) +
                                ": closed form requires a TrueDiagonal spectrum");
}
}  // namespace

Eigen::MatrixXd analytic_solution_matrix(const Eigen::MatrixXd& W0,
                                         const CovarianceSpectrum& a, double t) {
  require_diagonal(a, "analytic_solution_matrix");
  const int d = a.dim();
  if (W0.rows() != d || W0.cols() != d)
    throw std::invalid_argument("analytic_solution_matrix: dimension mismatch");
  if (!(t >= 0) || !std::isfinite(t))
    throw std::invalid_argument("analytic_solution_matrix: t must be finite and >= 0");

  Eigen::MatrixXd W(d, d);
  for (int j = 0; j < d; ++j) {
    const double decay = std::exp(-a.a[j] * t);
    for (int i = 0; i < d; ++i) W(i, j) = decay * W0(i, j);
    if (a.a[j] > 0) W(j, j) += 1.0 - decay;
  }
  return W;
}

OutputDecomposition analytic_output(const Eigen::MatrixXd& W0,
                                    const CovarianceSpectrum& a,
                                    const Eigen::VectorXd& z, double t) {
  require_diagonal(a, "analytic_output");
  const int d = a.dim();
  if (W0.rows() != d || W0.cols() != d || z.size() != d)
    throw std::invalid_argument("analytic_output: dimension mismatch");
  if (!(t >= 0) || !std::isfinite(t))
    throw std::invalid_argument("analytic_output: t must be finite and >= 0");

  OutputDecomposition out;
  out.growth = Eigen::VectorXd::Zero(d);
  out.noise = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    if (a.a[k] > 0) out.growth[k] = (1.0 - std::exp(-a.a[k] * t)) * z[k];
    double acc = 0;
    for (int i = 0; i < d; ++i)
      acc += std::exp(-a.a[i] * t) * W0(k, i) * z[i];
    out.noise[k] = acc;
  }
  out.total = out.growth + out.noise;
  return out;
}

EulerResult euler_reference(const Eigen::MatrixXd& W0, const CovarianceSpectrum& A,
                            double step, double horizon, long record_stride) {
  const int d = A.dim();
  if (W0.rows() != d || W0.cols() != d)
    throw std::invalid_argument("euler_reference: dimension mismatch");
  if (!(step > 0) || !(horizon > 0))
    throw std::invalid_argument("euler_reference: step and horizon must be positive");
  if (record_stride < 1) record_stride = 1;
  if (step * A.max_eigenvalue() >= 1.0)
    throw std::invalid_argument(
        "euler_reference: unstable step (step * max eigenvalue >= 1)");

  const long steps = static_cast<long>(std::llround(horizon / step));
  EulerResult out;
  Eigen::MatrixXd W = W0;
  out.times.push_back(0.0);
  out.weights.push_back(W);
  for (long k = 1; k <= steps; ++k) {
    if (A.is_diagonal()) {
      for (int j = 0; j < d; ++j) {
        if (A.a[j] == 0.0) continue;
        const double f = step * A.a[j];
        for (int i = 0; i < d; ++i)
          W(i, j) -= f * (W(i, j) - (i == j ? 1.0 : 0.0));
      }
    } else {
      Eigen::MatrixXd e = W - Eigen::MatrixXd::Identity(d, d);
      W.noalias() -= step * (e * A.matrix);
    }
    if (k % record_stride == 0 || k == steps) {
      out.times.push_back(step * static_cast<double>(k));
      out.weights.push_back(W);
    }
  }
  return out;
}

double time_to_fraction(double a_k, double rho) {
  if (!(rho > 0) || !(rho < 1))
    throw std::invalid_argument("time_to_fraction: rho must lie in (0, 1)");
  if (a_k < 0)
    throw std::invalid_argument("time_to_fraction: a_k must be >= 0");
  if (a_k == 0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-rho) / a_k;
}

Trajectory sample_analytic_trajectory(const Eigen::MatrixXd& W0,
                                      const CovarianceSpectrum& a,
                                      const Eigen::VectorXd& x_hat, double t_max,
                                      double dt) {
  require_diagonal(a, "sample_analytic_trajectory");
  if (!(dt > 0) || !(t_max >= 0))
    throw std::invalid_argument("sample_analytic_trajectory: bad grid");
  Trajectory traj;
  traj.meta.model = ModelKind::OneLayerAnalytic;
  traj.meta.dim = a.dim();
  traj.meta.eta = dt;
  traj.meta.a = a.a;
  traj.meta.x_hat = x_hat;
  const long npts = static_cast<long>(std::floor(t_max / dt)) + 1;
  traj.times.reserve(npts);
  traj.weights.reserve(npts);
  for (long k = 0; k < npts; ++k) {
    const double t = dt * static_cast<double>(k);
    Eigen::MatrixXd W = analytic_solution_matrix(W0, a, t);
    traj.times.push_back(t);
    traj.outputs.push_back(W * x_hat);
    traj.loss_population.push_back(population_loss(W, a));
    traj.loss_test.push_back(point_loss(W, x_hat));
    traj.weights.push_back(std::move(W));
  }
  return traj;
}

}  // namespace simlab
