#include "simlab/losses.hpp"

#include <stdexcept>

#include "simlab/rng.hpp"

namespace simlab {

Eigen::VectorXd test_point(const TestIndex& v, const SimConfig& config) {
  config.validate();
  v.validate(config.s);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(config.d);
  for (int p = 0; p < config.s; ++p)
    if (v.v[p]) x[p] = config.mu[p];
  if (config.rotated()) x = haar_orthogonal(config.d, *config.rotation_seed) * x;
  return x;
}

Eigen::VectorXd test_point(const SimConfig& config) {
  return test_point(TestIndex::ones(config.s), config);
}

double population_loss(const Eigen::MatrixXd& W, const CovarianceSpectrum& A) {
  if (W.rows() != W.cols() || W.rows() != A.dim())
    throw std::invalid_argument("population_loss: dimension mismatch");
  if (A.is_diagonal()) {
    double acc = 0;
    for (int j = 0; j < A.dim(); ++j) {
      if (A.a[j] == 0.0) continue;
      double col = 0;
      for (int i = 0; i < A.dim(); ++i) {
        double e = W(i, j) - (i == j ? 1.0 : 0.0);
        col += e * e;
      }
      acc += A.a[j] * col;
    }
    return 0.5 * acc;
  }
  Eigen::MatrixXd e = W - Eigen::MatrixXd::Identity(W.rows(), W.cols());
  return 0.5 * (e * A.matrix).cwiseProduct(e).sum();
}

double point_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& z) {
  if (W.rows() != W.cols() || W.cols() != z.size())
    throw std::invalid_argument("point_loss: dimension mismatch");
  return 0.5 * (W * z - z).squaredNorm();
}

}  // namespace simlab
