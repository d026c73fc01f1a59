#include "simlab/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace simlab {

Eigen::MatrixXd CovarianceSpectrum::dense() const {
  if (kind == Kind::TrueDiagonal) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    m.diagonal() = a;
    return m;
  }
  return matrix;
}

double CovarianceSpectrum::max_eigenvalue() const {
  if (kind == Kind::TrueDiagonal) return a.size() ? a.maxCoeff() : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CovarianceSpectrum CovarianceSpectrum::true_diagonal(Eigen::VectorXd a) {
  for (int p = 0; p < a.size(); ++p)
    if (!std::isfinite(a[p]) || a[p] < 0)
      throw std::invalid_argument(
          "CovarianceSpectrum: diagonal entries must be finite and >= 0");
  CovarianceSpectrum c;
  c.kind = Kind::TrueDiagonal;
  c.a = std::move(a);
  return c;
}

CovarianceSpectrum CovarianceSpectrum::empirical(Eigen::MatrixXd m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("CovarianceSpectrum: matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(
        "CovarianceSpectrum: matrix must be symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(
        "CovarianceSpectrum: matrix must be PSD within -1e-10");
  CovarianceSpectrum c;
  c.kind = Kind::EmpiricalSymmetric;
  c.a = m.diagonal();
  c.matrix = std::move(m);
  return c;
}

CovarianceSpectrum build_covariance(const SimConfig& config) {
  config.validate();
  if (config.rotated())
    throw std::invalid_argument(
        "build_covariance: true covariance is defined in the axis-aligned "
        "frame; rotated configs are rejected");
  double clusters = static_cast<double>(config.cluster_count());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(config.d);
  for (int p = 0; p < config.s; ++p)
    a[p] = config.sigma[p] * config.sigma[p] +
           config.mu[p] * config.mu[p] / clusters;
  return CovarianceSpectrum::true_diagonal(std::move(a));
}

}  // namespace simlab
