#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace simlab {

enum class ModelKind { OneLayerAnalytic, OneLayerEuler, TwoLayerW, TwoLayerU };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct TrajectoryMeta {
  ModelKind model = ModelKind::OneLayerAnalytic;
  int dim = 0;
  int d_prime = 0;               // two-layer only
  double eta = 0.0;              // step size (discrete) or grid spacing dt
  Eigen::VectorXd a;             // diagonal spectrum; empty for empirical A
  Eigen::VectorXd x_hat;         // evaluation point for the test loss
  std::uint64_t seed = 0;
};

// Time-indexed record of a training run. For discrete models `times` holds
// step indices; for the one-layer closed form it holds continuous t.
struct Trajectory {
  TrajectoryMeta meta;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> outputs;  // W(t) * x_hat
  std::vector<double> loss_population;
  std::vector<double> loss_test;

  // Optional per-entry G/S/N decomposition, same indexing as weights.
  bool has_decomposition = false;
  bool has_noise = false;  // noise may be recorded without G and S
  std::vector<Eigen::MatrixXd> growth;
  std::vector<Eigen::MatrixXd> suppression;
  std::vector<Eigen::MatrixXd> noise;

  long steps() const { return static_cast<long>(times.size()); }
  int dim() const { return meta.dim; }
};

}  // namespace simlab
