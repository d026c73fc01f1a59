#include "simlab/dataset.hpp"

#include <stdexcept>

#include "simlab/rng.hpp"

namespace simlab {

Dataset sample_dataset(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  const int d = config.d;
  const int clusters = config.cluster_count();
  const int total = clusters * config.n;

  Rng rng(seed);
  Dataset out;
  out.points.resize(total, d);
  out.cluster_of.resize(total);

  int row = 0;
  for (int p = 0; p < clusters; ++p) {
    const bool origin = p >= config.s;
    for (int k = 0; k < config.n; ++k, ++row) {
      // Always draw d deviates so the stream does not depend on sigma.
      for (int q = 0; q < d; ++q)
        out.points(row, q) = config.sigma[q] * rng.normal();
      if (!origin) out.points(row, p) += config.mu[p];
      out.cluster_of[row] = p;
    }
  }

  if (config.rotated()) {
    Eigen::MatrixXd r = haar_orthogonal(d, *config.rotation_seed);
    out.points = out.points * r.transpose();
  }
  return out;
}

CovarianceSpectrum empirical_covariance(const Dataset& dataset) {
  if (dataset.size() == 0)
    throw std::invalid_argument("empirical_covariance: empty dataset");
  const int d = dataset.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < dataset.size(); ++i) {
    const auto x = dataset.points.row(i);
    m.noalias() += x.transpose() * x;
  }
  m /= static_cast<double>(dataset.size());
  // Mirror the upper triangle so the estimate is symmetric to the bit.
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) m(j, i) = m(i, j);
  return CovarianceSpectrum::empirical(std::move(m));
}

}  // namespace simlab
