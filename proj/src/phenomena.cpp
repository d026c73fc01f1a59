#include "simlab/phenomena.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "simlab/losses.hpp"

namespace simlab {

namespace {

std::vector<double> smooth(const std::vector<double>& v, int window) {
  const int n = static_cast<int>(v.size());
  const int r = window / 2;
  if (r == 0) return v;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - r);
    const int hi = std::min(n - 1, i + r);
    double s = 0;
    for (int k = lo; k <= hi; ++k) s += v[k];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

DescentSummary count_descents(const LossCurve& curve) {
  if (curve.values.size() < 2)
    throw std::invalid_argument("count_descents: need at least two values");
  if (curve.smoothing_window < 1)
    throw std::invalid_argument("count_descents: smoothing window must be >= 1");
  if (!(curve.descent_threshold > 0) || !(curve.descent_threshold < 1))
    throw std::invalid_argument("count_descents: threshold must lie in (0, 1)");
  for (double v : curve.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("count_descents: values must be finite");

  const std::vector<double> s = smooth(curve.values, curve.smoothing_window);
  const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
  const double amplitude = *mx_it - *mn_it;
  DescentSummary out;
  if (amplitude <= 0) return out;  // flat curve: no descents

  const double th = curve.descent_threshold * amplitude;
  bool in_descent = false;
  double peak = s[0], valley = 0;
  long peak_idx = 0, valley_idx = 0;
  for (long i = 1; i < static_cast<long>(s.size()); ++i) {
    if (!in_descent) {
      if (s[i] > peak) {
        peak = s[i];
        peak_idx = i;
      } else if (peak - s[i] > th) {
        in_descent = true;
        valley = s[i];
        valley_idx = i;
      }
    } else {
      if (s[i] < valley) {
        valley = s[i];
        valley_idx = i;
      } else if (s[i] - valley > th) {
        out.segments.push_back({peak_idx, valley_idx});
        in_descent = false;
        peak = s[i];
        peak_idx = i;
      }
    }
  }
  if (in_descent) out.segments.push_back({peak_idx, valley_idx});
  out.count = static_cast<int>(out.segments.size());
  return out;
}

LearningOrder learning_order(const Trajectory& traj, const SimConfig& config,
                             double rho) {
  config.validate();
  if (!(rho > 0) || !(rho < 1))
    throw std::invalid_argument("learning_order: rho must lie in (0, 1)");
  if (traj.outputs.empty())
    throw std::invalid_argument("learning_order: trajectory lacks outputs");

  LearningOrder out;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> crossing;
  for (int k = 0; k < config.s; ++k) {
    if (config.mu[k] <= 0) continue;  // mu_k = 0 coordinates excluded
    out.coordinates.push_back(k);
    double cross = inf;
    for (size_t i = 0; i < traj.outputs.size(); ++i) {
      if (traj.outputs[i][k] >= rho * config.mu[k]) {
        cross = traj.times[i];
        break;
      }
    }
    crossing.push_back(cross);
  }
  std::vector<size_t> idx(out.coordinates.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return crossing[a] < crossing[b]; });
  for (size_t r : idx) {
    out.order.push_back(out.coordinates[r]);
    out.crossing_steps.push_back(crossing[r]);
  }
  return out;
}

std::vector<double> slowdown_profile(const Trajectory& traj, int window) {
  if (window < 1)
    throw std::invalid_argument("slowdown_profile: window must be >= 1");
  std::vector<double> speeds;
  const long n = static_cast<long>(traj.outputs.size());
  for (long t = 0; t + window < n; ++t)
    speeds.push_back((traj.outputs[t + window] - traj.outputs[t]).norm());
  return speeds;
}

LatticeResult lattice_losses(const Trajectory& traj, const SimConfig& config,
                             const std::vector<long>& epochs) {
  config.validate();
  if (config.s > 16)
    throw std::invalid_argument("lattice_losses: s <= 16 required (2^s lattice)");
  const unsigned count = 1u << config.s;

  LatticeResult out;
  // Precompute all test points once.
  std::vector<Eigen::VectorXd> points(count);
  for (unsigned m = 0; m < count; ++m)
    points[m] = test_point(TestIndex::from_mask(m, config.s), config);

  for (long e : epochs) {
    if (e < 0 || e >= traj.steps())
      throw std::invalid_argument("lattice_losses: epoch index out of range");
    const Eigen::MatrixXd& W = traj.weights[e];
    std::vector<double> losses(count);
    for (unsigned m = 0; m < count; ++m) losses[m] = point_loss(W, points[m]);
    const double tol =
        1e-9 * *std::max_element(losses.begin(), losses.end());
    for (unsigned u = 0; u < count; ++u)
      for (unsigned v = 0; v < count; ++v) {
        if (u == v || (u & v) != u) continue;  // need u <= v componentwise
        if (losses[u] > losses[v] + tol)
          out.violations.push_back({e, u, v, losses[u], losses[v]});
      }
    out.epochs.push_back(e);
    out.losses.push_back(std::move(losses));
  }
  return out;
}

std::vector<TrappedEntry> detect_failure_mode(const Trajectory& traj,
                                              const TheoryConstants& constants) {
  if (traj.meta.a.size() == 0)
    throw std::invalid_argument("detect_failure_mode: diagonal spectrum required");
  if (traj.weights.empty())
    throw std::invalid_argument("detect_failure_mode: empty trajectory");
  std::vector<TrappedEntry> out;
  const long T = traj.steps();
  for (int i = 0; i < traj.dim(); ++i) {
    if (traj.meta.a[i] <= 0) continue;  // only major entries
    long below = -1;
    for (long t = 0; t < T; ++t)
      if (traj.weights[t](i, i) < constants.omega / 2) {
        below = t;
        break;
      }
    if (below >= 0)
      out.push_back({i, below, "exited_below"});
    else if (traj.weights[T - 1](i, i) < 0.5)
      out.push_back({i, T - 1, "terminal_low"});
  }
  return out;
}

}  // namespace simlab
