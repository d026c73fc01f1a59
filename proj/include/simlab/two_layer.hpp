#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "simlab/covariance.hpp"
#include "simlab/theory_constants.hpp"
#include "simlab/trajectory.hpp"

namespace simlab {

// Thrown when a simulated entry exceeds the divergence threshold.
struct DivergenceError : std::runtime_error {
  long step;
  int i, j;
  double value;
  DivergenceError(long step, int i, int j, double value);
};

struct InitSpec {
  enum class Mode { UniformMagnitude, GaussianU, ExplicitW, ExplicitU };

  Mode mode = Mode::GaussianU;
  // UniformMagnitude: |w_ij(0)| uniform in [omega, beta*omega], seeded signs,
  // positive diagonal; off-diagonal signs re-drawn until W0 is PSD.
  double omega = 0;
  double beta = 0;
  std::uint64_t sign_seed = 0;
  // GaussianU: U entries N(0, tau^2), W0 = U U^T.
  double tau = 0;
  std::uint64_t seed = 0;
  // ExplicitW / ExplicitU.
  Eigen::MatrixXd matrix;

  static InitSpec uniform_magnitude(double omega, double beta, std::uint64_t sign_seed);
  static InitSpec gaussian_u(double tau, std::uint64_t seed);
  static InitSpec explicit_w(Eigen::MatrixXd W0);
  static InitSpec explicit_u(Eigen::MatrixXd U0);
};

struct TwoLayerConfig {
  int d = 0;
  int d_prime = 0;  // columns of U, >= d
  double eta = 0;
  long steps = 0;
  InitSpec init;

  void validate() const;
};

struct InitResult {
  Eigen::MatrixXd W0;
  std::optional<Eigen::MatrixXd> U0;
};

InitResult initialize(const InitSpec& spec, int d, int d_prime);

// Right-hand side of the W-recursion:
//   W A + A W - 1/2 (A W^2 + W^2 A + 2 W A W).
// W must be symmetric within 1e-10; A diagonal or general symmetric.
Eigen::MatrixXd drift(const Eigen::MatrixXd& W, const CovarianceSpectrum& A);

// Three-way split of one entry's drift under diagonal A:
//   G_ij = w_ij (a_i + a_j)
//   S_ij = 1/2 w_ij [w_ii (3 a_i + a_j) + [i != j] w_jj (3 a_j + a_i)]
//   N_ij = 1/2 sum_{k != i, k != j} w_ki w_kj (a_i + a_j + 2 a_k)
// so that G - S - N = drift(W, A)_ij. Indices are 0-based.
struct TermTriple {
  double growth = 0;
  double suppression = 0;
  double noise = 0;
  double drift() const { return growth - suppression - noise; }
};

TermTriple decompose_entry(const Eigen::MatrixXd& W, const CovarianceSpectrum& a,
                           int i, int j);

struct SimulateOptions {
  // Record G/S/N matrices each step (diagonal A only).
  bool record_decomposition = false;
  // Record only the noise matrix (cheaper; implied by record_decomposition).
  bool record_noise = false;
  // Evaluation point for the test loss; zero vector when empty.
  Eigen::VectorXd x_hat;
  // Stability gate scale: eta * 9 * gamma * alpha <= 1 when provided,
  // otherwise eta * lambda_max(A) < 0.5.
  const TheoryConstants* constants = nullptr;
  double divergence_threshold = 1e6;
  // Optional early stop: once every diagonal >= stop_diag_floor, run
  // stop_extra_steps more and truncate. Disabled when < 0.
  double stop_diag_floor = -1.0;
  long stop_extra_steps = 0;
};

// Iterates W <- W + eta * drift(W, A) for `steps` steps, recording every
// state (steps + 1 records including W0).
Trajectory simulate_w_recursion(const Eigen::MatrixXd& W0, const CovarianceSpectrum& A,
                                double eta, long steps,
                                const SimulateOptions& options = {});

// Gradient descent on U for the factored model W = U U^T:
//   U <- U - eta * 1/2 [A (U U^T - I) + (U U^T - I) A] U,
// the half-loss gradient whose induced W-update matches the W-recursion
// drift to O(eta^2). Records W = U U^T (exactly symmetric PSD).
Trajectory simulate_u_descent(const Eigen::MatrixXd& U0, const CovarianceSpectrum& A,
                              double eta, long steps,
                              const SimulateOptions& options = {});

}  // namespace simlab
