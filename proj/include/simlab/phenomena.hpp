#pragma once

#include <string>
#include <vector>

#include "simlab/sim_config.hpp"
#include "simlab/theory_constants.hpp"
#include "simlab/trajectory.hpp"

namespace simlab {

struct LossCurve {
  std::vector<double> values;
  int smoothing_window = 5;        // centered moving average
  double descent_threshold = 0.05; // relative to max - min of the smoothed curve
};

struct DescentSegment {
  long peak = 0;    // index where the descent starts (local max)
  long valley = 0;  // index where it bottoms out
};

struct DescentSummary {
  int count = 0;
  std::vector<DescentSegment> segments;
};

// A descent is a fall of the smoothed curve by more than
// threshold * (global max - min); consecutive descents must be separated by
// a rise of the same magnitude. All-equal curves have zero descents.
DescentSummary count_descents(const LossCurve& curve);

struct LearningOrder {
  std::vector<int> order;             // coordinates, first-learned first
  std::vector<double> crossing_steps; // recorded index of first crossing, +inf if never
  std::vector<int> coordinates;       // coordinates considered (mu_k > 0)
};

// Ranks coordinates by the first recorded step with f_k >= rho * mu_k.
// Coordinates with mu_k = 0 are excluded; unreached ones rank last; ties
// keep index order.
LearningOrder learning_order(const Trajectory& traj, const SimConfig& config, double rho);

// speed_t = || f(t + window) - f(t) || over recorded outputs.
std::vector<double> slowdown_profile(const Trajectory& traj, int window);

struct LatticeViolation {
  long epoch = 0;   // recorded step index
  unsigned u = 0;   // ordered pair u <= v componentwise with loss(u) > loss(v)
  unsigned v = 0;
  double loss_u = 0;
  double loss_v = 0;
};

struct LatticeResult {
  std::vector<long> epochs;
  // losses[e][mask] = point loss at x_hat^{(mask)} at epochs[e]
  std::vector<std::vector<double>> losses;
  std::vector<LatticeViolation> violations;
};

// Evaluates the point loss at every test index x_hat^{(v)}, v in {0,1}^s, at
// the requested recorded steps, and lists order-homomorphism violations
// beyond 1e-9 * (max loss at that epoch). Requires s <= 16.
LatticeResult lattice_losses(const Trajectory& traj, const SimConfig& config,
                             const std::vector<long>& epochs);

struct TrappedEntry {
  int index = 0;
  long step = 0;
  std::string reason;  // "exited_below" or "terminal_low"
};

// A major entry (i,i) is trapped when it drops below omega / 2 at some step
// or its terminal value is below 1/2.
std::vector<TrappedEntry> detect_failure_mode(const Trajectory& traj,
                                              const TheoryConstants& constants);

}  // namespace simlab
