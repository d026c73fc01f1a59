#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simlab/theory_constants.hpp"
#include "simlab/trajectory.hpp"

namespace simlab {

enum class Phase { Initial, Left };

struct AssumptionCheck {
  std::string id;      // e.g. "A2.eta"
  std::string detail;  // the inequality instance, human-readable
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  // Set when the literal index convention (a_i - 3 a_j for i > j) fails but
  // the canonical one (larger eigenvalue in the role of a_i) passes.
  bool ordering_flag = false;
  bool all_pass() const;
  const AssumptionCheck* find(const std::string& id) const;
};

// One bound checked for one entry over a step range. Margins are
// bound - observed for upper bounds and observed - bound for lower bounds,
// so negative means violated. A violation is margin < -kLemmaSlack.
struct EntryCheck {
  int i = 0, j = 0;
  std::string bound;         // sub-bound id within the lemma
  long checked_begin = 0;    // [begin, end) in recorded steps
  long checked_end = 0;
  std::optional<long> first_violation;
  double min_margin = 0;
  bool empty() const { return checked_end <= checked_begin; }
};

struct LemmaReport {
  std::string lemma;
  bool vacuous = false;  // assumptions or preconditions not satisfied
  std::vector<EntryCheck> checks;
  std::map<std::string, double> derived_times;  // T1, T1_i, t0_*, ...

  long violation_count() const;
  bool any_nonempty_range() const;
};

// Additive slack absorbing floating-point round-off in the analytic bounds.
inline constexpr double kLemmaSlack = 1e-12;

// Tightest constants satisfying Assumption 1 for the given spectrum and
// initial matrix: alpha = min a_k, gamma = max a_k / alpha,
// omega = min |w_ij(0)|, beta = max |w_ij(0)| / omega.
// Throws std::invalid_argument when any a_k <= 0 or any w_ij(0) == 0.
struct FittedConstants {
  double alpha, gamma, beta, omega;
};
FittedConstants fit_constants(const Eigen::VectorXd& a, const Eigen::MatrixXd& W0);

// Evaluates every inequality of Assumptions 1-5 literally. Failures are
// verdicts, not errors. Pair inequalities of Assumption 5 are checked in the
// canonical orientation (larger eigenvalue as a_i); the literal i > j
// convention is evaluated too and recorded (see AssumptionReport).
AssumptionReport check_assumptions(const TheoryConstants& constants,
                                   const Eigen::VectorXd& a, int d);

// Initial phase: |w| <= P beta omega (closed inequality).
Phase classify_phase(double w_ij, const TheoryConstants& constants);

// |N_ij(t)| <= 2 P gamma alpha d beta^2 omega^2 for all entries and steps.
// Requires recorded noise terms and diagonal A.
LemmaReport verify_noise_bound(const Trajectory& traj, const TheoryConstants& constants,
                               int d);

// Three growth bounds:
//   upper:          |w_ij(t)| <= |w_ij(0)| exp[eta t (a_i+a_j) kappa], all t
//   lower_uniform:  |w_ij(t)| >= |w_ij(0)| exp[eta t (a_i+a_j) / kappa]
//                   and sign(w_ij(t)) = sign(w_ij(0)), for t <= T1
//   lower_diagonal: w_ii(t) >= w_ii(0) exp[2 eta t a_i / kappa], t <= T1_i
// with T1 = log P / (2 eta gamma alpha kappa) and
// T1_i = log(P beta omega / w_ii(0)) / (2 eta a_i kappa).
LemmaReport verify_growth_bounds(const Trajectory& traj, const TheoryConstants& constants,
                                 const Eigen::VectorXd& a);

// After-initial growth of diagonals: from t0 (first step with
// w_ii >= P beta omega), while w_ii < lambda:
//   w_ii(t0 + t) >= w_ii(t0) exp[2 eta t a_i (1 - lambda) / kappa].
// lambda must lie in the open interval (P beta omega, 1 - 1/K).
LemmaReport verify_after_initial(const Trajectory& traj, const TheoryConstants& constants,
                                 const Eigen::VectorXd& a, double lambda);

// Diagonal caps: 0 <= w_ii(t) <= 1 + 2/K; per-step update |dw_ii| <= 1/K;
// terminal floor: once w_ii >= 1 - 2/K it stays there.
LemmaReport verify_caps_and_terminal(const Trajectory& traj,
                                     const TheoryConstants& constants);

// Suppression: for each off-diagonal (i,j), once the dominant diagonal
// (the one with the larger eigenvalue) strictly exceeds 0.8 at t0,
// |w_ij(t')| <= max(|w_ij(t0)|, omega) for all t' >= t0. Also checks the
// global claim |w_ij(t)| <= P beta omega for all i != j and all t.
// Requires a strictly descending on its support; otherwise vacuous.
LemmaReport verify_suppression(const Trajectory& traj, const TheoryConstants& constants,
                               const Eigen::VectorXd& a);

}  // namespace simlab
