#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "simlab/covariance.hpp"
#include "simlab/sim_config.hpp"

namespace simlab {

struct Dataset {
  Eigen::MatrixXd points;       // one row per point, d columns
  std::vector<int> cluster_of;  // cluster index per point; origin cluster = s

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Draws n points per cluster, in cluster order, d normal deviates per point.
// Deterministic given (config, seed). If config.rotation_seed is set, a
// Haar-random orthogonal matrix is applied to every point.
Dataset sample_dataset(const SimConfig& config, std::uint64_t seed);

// Mean of outer products over all points.
CovarianceSpectrum empirical_covariance(const Dataset& dataset);

}  // namespace simlab
