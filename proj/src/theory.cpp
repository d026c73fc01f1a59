#include "simlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace simlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp with the argument capped so bounds stay finite in the reports.
double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

void push(std::vector<AssumptionCheck>& checks, const std::string& id,
          const std::string& detail, double lhs, double rhs, bool pass) {
  checks.push_back({id, detail, lhs, rhs, pass});
}

const Eigen::VectorXd& spectrum_of(const Trajectory& traj) {
  if (traj.meta.a.size() == 0)
    throw std::invalid_argument(
        "theory oracle: trajectory lacks a diagonal spectrum");
  return traj.meta.a;
}

bool assumptions_hold(const TheoryConstants& c, const Eigen::VectorXd& a, int d) {
  return check_assumptions(c, a, d).all_pass();
}

LemmaReport vacuous_report(const std::string& lemma) {
  LemmaReport r;
  r.lemma = lemma;
  r.vacuous = true;
  return r;
}

struct MarginTracker {
  double min_margin = kInf;
  std::optional<long> first_violation;
  long begin = 0, end = 0;
  bool started = false;

  void observe(long t, double margin) {
    if (!started) {
      begin = t;
      started = true;
    }
    end = t + 1;
    if (margin < min_margin) min_margin = margin;
    if (!first_violation && margin < -kLemmaSlack) first_violation = t;
  }

  EntryCheck finish(int i, int j, const std::string& bound) const {
    EntryCheck c;
    c.i = i;
    c.j = j;
    c.bound = bound;
    c.checked_begin = started ? begin : 0;
    c.checked_end = started ? end : 0;
    c.first_violation = first_violation;
    c.min_margin = started ? min_margin : 0.0;
    return c;
  }
};

}  // namespace

bool AssumptionReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

long LemmaReport::violation_count() const {
  long n = 0;
  for (const auto& c : checks)
    if (c.first_violation) ++n;
  return n;
}

bool LemmaReport::any_nonempty_range() const {
  for (const auto& c : checks)
    if (!c.empty()) return true;
  return false;
}

FittedConstants fit_constants(const Eigen::VectorXd& a, const Eigen::MatrixXd& W0) {
  if (a.size() == 0) throw std::invalid_argument("fit_constants: empty spectrum");
  for (int k = 0; k < a.size(); ++k)
    if (!(a[k] > 0))
      throw std::invalid_argument(
          "fit_constants: every a_k must be positive on the support considered");
  if (W0.size() == 0) throw std::invalid_argument("fit_constants: empty W0");
  double wmin = kInf, wmax = 0;
  for (int i = 0; i < W0.rows(); ++i)
    for (int j = 0; j < W0.cols(); ++j) {
      const double w = std::abs(W0(i, j));
      if (w == 0.0)
        throw std::invalid_argument(
            "fit_constants: zero entries in W0 admit no valid omega");
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
    }
  FittedConstants f;
  f.alpha = a.minCoeff();
  f.gamma = a.maxCoeff() / f.alpha;
  f.omega = wmin;
  f.beta = wmax / wmin;
  return f;
}

AssumptionReport check_assumptions(const TheoryConstants& c,
                                   const Eigen::VectorXd& a, int d) {
  AssumptionReport rep;
  auto& ch = rep.checks;

  const double amin = a.size() ? a.minCoeff() : 0.0;
  const double amax = a.size() ? a.maxCoeff() : 0.0;
  push(ch, "A1.alpha", "alpha <= min a_k", c.alpha, amin, c.alpha > 0 && c.alpha <= amin);
  push(ch, "A1.gamma_alpha", "max a_k <= gamma * alpha", amax, c.gamma * c.alpha,
       amax <= c.gamma * c.alpha);
  push(ch, "A1.gamma", "gamma > 1", c.gamma, 1.0, c.gamma > 1.0);
  push(ch, "A1.beta", "beta > 1", c.beta, 1.0, c.beta > 1.0);
  push(ch, "A1.omega", "omega > 0", c.omega, 0.0, c.omega > 0.0);

  push(ch, "A2.K", "K >= 20", c.K, 20.0, c.K >= 20.0);
  const double eta_bound = 1.0 / (9.0 * c.K * c.gamma * c.alpha);
  push(ch, "A2.eta", "eta <= 1 / (9 K gamma alpha)", c.eta, eta_bound,
       c.eta <= eta_bound);

  const double x = c.phase_threshold();
  push(ch, "A3.phase", "P omega beta <= 0.4", x, 0.4, x <= 0.4);

  const double c4 = std::min(c.kappa - 1.0, 1.0 - 1.0 / std::sqrt(c.kappa));
  const double omega_bound =
      std::min(c4 / (c.P * c.K * c.gamma * d * c.beta * c.beta),
               1.0 / std::sqrt(2.0 * c.beta));
  push(ch, "A4.omega",
       "omega <= min(min(kappa-1, 1-kappa^-1/2)/(P K gamma d beta^2), "
       "1/sqrt(2 beta))",
       c.omega, omega_bound, c.omega <= omega_bound);
  push(ch, "A4.kappa_low", "kappa > 1.1", c.kappa, 1.1, c.kappa > 1.1);
  push(ch, "A4.kappa_high", "kappa <= 1 + K / (2 C)", c.kappa,
       1.0 + 0.5 * c.K / c.C, c.kappa <= 1.0 + 0.5 * c.K / c.C);
  push(ch, "A4.P", "P >= 2", c.P, 2.0, c.P >= 2.0);

  // Assumption 5, canonical orientation: the larger eigenvalue of each pair
  // plays the role of a_i. The literal i > j reading is evaluated as well;
  // when only the literal one fails the report flags the index ordering.
  push(ch, "A5.C", "C >= 1", c.C, 1.0, c.C >= 1.0);
  const double a5_rhs =
      std::log(c.P) /
      (10.0 * c.kappa * c.kappa * std::log(1.0 / x) + std::log(c.P * c.beta));
  double ratio_worst = -kInf, gap_worst = kInf, raw_gap_worst = kInf;
  bool have_pair = false, have_raw_pair = false;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) {
      if (i > j) {
        raw_gap_worst = std::min(raw_gap_worst, a[i] - 3.0 * a[j]);
        have_raw_pair = true;
      }
      if (a[i] > a[j]) {
        have_pair = true;
        ratio_worst = std::max(ratio_worst, (a[i] + a[j]) / (2.0 * a[i]));
        gap_worst = std::min(gap_worst, a[i] - 3.0 * a[j]);
      }
    }
  if (!have_pair) {
    push(ch, "A5.ratio", "no index pairs (d <= 1 or constant spectrum)", 0.0,
         a5_rhs, true);
    push(ch, "A5.gap", "no index pairs (d <= 1 or constant spectrum)", 0.0, 0.0,
         true);
  } else {
    push(ch, "A5.ratio",
         "(a_i + a_j) / (2 a_i) <= log P / (10 kappa^2 log(1/(P beta omega)) "
         "+ log(P beta)), dominant a_i, worst pair",
         ratio_worst, a5_rhs, ratio_worst <= a5_rhs);
    const double gap_rhs = c.alpha / c.C;
    const bool canonical_pass = gap_worst >= gap_rhs;
    push(ch, "A5.gap", "a_i - 3 a_j >= alpha / C, dominant a_i, worst pair",
         gap_worst, gap_rhs, canonical_pass);
    if (have_raw_pair && canonical_pass && raw_gap_worst < gap_rhs)
      rep.ordering_flag = true;
  }
  return rep;
}

Phase classify_phase(double w_ij, const TheoryConstants& constants) {
  if (!(constants.P > 0) || !(constants.beta > 0) || !(constants.omega > 0))
    throw std::invalid_argument("classify_phase: constants must be positive");
  return std::abs(w_ij) <= constants.phase_threshold() ? Phase::Initial
                                                       : Phase::Left;
}

LemmaReport verify_noise_bound(const Trajectory& traj, const TheoryConstants& c,
                               int d) {
  if (!traj.has_noise)
    throw std::invalid_argument(
        "verify_noise_bound: trajectory lacks decomposition records");
  const Eigen::VectorXd& a = spectrum_of(traj);
  LemmaReport rep;
  rep.lemma = "noise_bound";
  if (!assumptions_hold(c, a, d)) return vacuous_report(rep.lemma);

  const double bound =
      2.0 * c.P * c.gamma * c.alpha * d * c.beta * c.beta * c.omega * c.omega;
  rep.derived_times["bound"] = bound;
  const long T = traj.steps();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      MarginTracker m;
      for (long t = 0; t < T; ++t)
        m.observe(t, bound - std::abs(traj.noise[t](i, j)));
      rep.checks.push_back(m.finish(i, j, "noise"));
    }
  return rep;
}

LemmaReport verify_growth_bounds(const Trajectory& traj, const TheoryConstants& c,
                                 const Eigen::VectorXd& a) {
  const int d = static_cast<int>(a.size());
  LemmaReport rep;
  rep.lemma = "growth_bounds";
  if (!assumptions_hold(c, a, d)) return vacuous_report(rep.lemma);

  const long T = traj.steps();
  const double x = c.phase_threshold();
  const double t1 =
      std::log(c.P) / (2.0 * c.eta * c.gamma * c.alpha * c.kappa);
  rep.derived_times["T1"] = t1;

  const Eigen::MatrixXd& W0 = traj.weights.front();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double w0 = W0(i, j);
      const double sgn = w0 >= 0 ? 1.0 : -1.0;
      MarginTracker upper, lower, phase;
      for (long t = 0; t < T; ++t) {
        const double w = traj.weights[t](i, j);
        const double rate = c.eta * static_cast<double>(t) * (a[i] + a[j]);
        upper.observe(t, std::abs(w0) * safe_exp(rate * c.kappa) - std::abs(w));
        if (t <= static_cast<long>(t1)) {
          lower.observe(t, sgn * w - std::abs(w0) * safe_exp(rate / c.kappa));
          phase.observe(t, x - std::abs(w));
        }
      }
      rep.checks.push_back(upper.finish(i, j, "upper"));
      rep.checks.push_back(lower.finish(i, j, "lower_uniform"));
      rep.checks.push_back(phase.finish(i, j, "phase_uniform"));
    }
    // Finer per-diagonal horizon.
    const double w0 = W0(i, i);
    const double t1i = w0 > 0 && w0 < x
                           ? std::log(x / w0) / (2.0 * c.eta * a[i] * c.kappa)
                           : 0.0;
    rep.derived_times["T1_" + std::to_string(i)] = t1i;
    MarginTracker diag;
    for (long t = 0; t < T && t <= static_cast<long>(t1i); ++t)
      diag.observe(t, traj.weights[t](i, i) -
                          w0 * safe_exp(2.0 * c.eta * static_cast<double>(t) *
                                        a[i] / c.kappa));
    rep.checks.push_back(diag.finish(i, i, "lower_diagonal"));
  }
  return rep;
}

LemmaReport verify_after_initial(const Trajectory& traj, const TheoryConstants& c,
                                 const Eigen::VectorXd& a, double lambda) {
  const double x = c.phase_threshold();
  if (!(lambda > x) || !(lambda < 1.0 - 1.0 / c.K))
    throw std::invalid_argument(
        "verify_after_initial: lambda must lie strictly inside "
        "(P beta omega, 1 - 1/K)");
  const int d = static_cast<int>(a.size());
  LemmaReport rep;
  rep.lemma = "after_initial_growth";
  if (!assumptions_hold(c, a, d)) return vacuous_report(rep.lemma);

  const long T = traj.steps();
  for (int i = 0; i < d; ++i) {
    long t0 = -1;
    for (long t = 0; t < T; ++t)
      if (traj.weights[t](i, i) >= x) {
        t0 = t;
        break;
      }
    MarginTracker m;
    if (t0 >= 0) {
      rep.derived_times["t0_" + std::to_string(i)] = static_cast<double>(t0);
      const double w_t0 = traj.weights[t0](i, i);
      for (long t = t0 + 1; t < T; ++t) {
        const double w = traj.weights[t](i, i);
        if (w >= lambda) break;
        const double lb = w_t0 * safe_exp(2.0 * c.eta *
                                          static_cast<double>(t - t0) * a[i] *
                                          (1.0 - lambda) / c.kappa);
        m.observe(t, w - lb);
      }
    }
    rep.checks.push_back(m.finish(i, i, "after_initial"));
  }
  return rep;
}

LemmaReport verify_caps_and_terminal(const Trajectory& traj,
                                     const TheoryConstants& c) {
  const Eigen::VectorXd& a = spectrum_of(traj);
  const int d = static_cast<int>(a.size());
  LemmaReport rep;
  rep.lemma = "caps_and_terminal";
  if (!assumptions_hold(c, a, d)) return vacuous_report(rep.lemma);

  const long T = traj.steps();
  const double cap = 1.0 + 2.0 / c.K;
  const double floor = 1.0 - 2.0 / c.K;
  for (int i = 0; i < d; ++i) {
    MarginTracker upper, nonneg, update, terminal;
    long t0 = -1;
    for (long t = 0; t < T; ++t) {
      const double w = traj.weights[t](i, i);
      upper.observe(t, cap - w);
      nonneg.observe(t, w);
      if (t + 1 < T)
        update.observe(t, 1.0 / c.K -
                              std::abs(traj.weights[t + 1](i, i) - w));
      if (t0 < 0 && w >= floor) t0 = t;
      if (t0 >= 0) terminal.observe(t, w - floor);
    }
    if (t0 >= 0)
      rep.derived_times["t_terminal_" + std::to_string(i)] =
          static_cast<double>(t0);
    rep.checks.push_back(upper.finish(i, i, "cap_upper"));
    rep.checks.push_back(nonneg.finish(i, i, "nonnegative"));
    rep.checks.push_back(update.finish(i, i, "update"));
    rep.checks.push_back(terminal.finish(i, i, "terminal_floor"));
  }
  return rep;
}

LemmaReport verify_suppression(const Trajectory& traj, const TheoryConstants& c,
                               const Eigen::VectorXd& a) {
  const int d = static_cast<int>(a.size());
  LemmaReport rep;
  rep.lemma = "suppression";
  if (!assumptions_hold(c, a, d)) return vacuous_report(rep.lemma);
  for (int k = 0; k + 1 < d; ++k)
    if (!(a[k] > a[k + 1])) return vacuous_report(rep.lemma);

  const long T = traj.steps();
  const double x = c.phase_threshold();
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) {
      // Descending spectrum: index j of the pair (i, j), i > j, carries the
      // larger eigenvalue and its diagonal is the suppressor.
      const int dom = j;
      long t0 = -1;
      for (long t = 0; t < T; ++t)
        if (traj.weights[t](dom, dom) > 0.8) {
          t0 = t;
          break;
        }
      MarginTracker supp;
      if (t0 >= 0) {
        rep.derived_times["t0_" + std::to_string(i) + "_" + std::to_string(j)] =
            static_cast<double>(t0);
        const double ref =
            std::max(std::abs(traj.weights[t0](i, j)), c.omega);
        for (long t = t0; t < T; ++t)
          supp.observe(t, ref - std::abs(traj.weights[t](i, j)));
      }
      rep.checks.push_back(supp.finish(i, j, "suppression"));

      MarginTracker phase;
      for (long t = 0; t < T; ++t)
        phase.observe(t, x - std::abs(traj.weights[t](i, j)));
      rep.checks.push_back(phase.finish(i, j, "initial_phase"));
    }
  }
  return rep;
}

}  // namespace simlab
