#include "simlab/two_layer.hpp"

#include <cmath>
#include <sstream>

#include "simlab/losses.hpp"
#include "simlab/rng.hpp"

namespace simlab {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_symmetric(const Eigen::MatrixXd& W, const char* who) {
  if (W.rows() != W.cols())
    throw std::invalid_argument(std::string(who) + ": W must be square");
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw std::invalid_argument(std::string(who) +
                                ": W must be symmetric within 1e-10");
}

void mirror_upper(Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
}

// Entrywise drift for diagonal A; upper triangle computed, then mirrored.
Eigen::MatrixXd drift_diagonal(const Eigen::MatrixXd& W, const Eigen::VectorXd& a) {
  const int d = static_cast<int>(a.size());
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double second = 0;
      for (int k = 0; k < d; ++k)
        second += W(i, k) * W(k, j) * (a[i] + a[j] + 2 * a[k]);
      out(i, j) = W(i, j) * (a[i] + a[j]) - 0.5 * second;
    }
  }
  mirror_upper(out);
  return out;
}

Eigen::MatrixXd drift_general(const Eigen::MatrixXd& W, const Eigen::MatrixXd& A) {
  Eigen::MatrixXd W2 = W * W;
  Eigen::MatrixXd out =
      W * A + A * W - 0.5 * (A * W2 + W2 * A + 2.0 * W * A * W);
  mirror_upper(out);
  return out;
}

void check_stability(double eta, const CovarianceSpectrum& A,
                     const SimulateOptions& options, const char* who) {
  if (!(eta > 0))
    throw std::invalid_argument(std::string(who) + ": eta must be positive");
  if (options.constants) {
    const TheoryConstants& c = *options.constants;
    if (eta * 9.0 * c.gamma * c.alpha > 1.0)
      throw std::invalid_argument(std::string(who) +
                                  ": eta * 9 * gamma * alpha > 1 (unstable)");
  } else if (eta * A.max_eigenvalue() >= 0.5) {
    throw std::invalid_argument(
        std::string(who) + ": eta * max eigenvalue of A must stay below 0.5");
  }
}

struct Recorder {
  Trajectory traj;
  const CovarianceSpectrum* A;
  Eigen::VectorXd x_hat;
  bool record_full = false;
  bool record_noise = false;

  void init(ModelKind model, int d, int d_prime, double eta,
            const CovarianceSpectrum& cov, const SimulateOptions& options,
            long expected_steps) {
    A = &cov;
    traj.meta.model = model;
    traj.meta.dim = d;
    traj.meta.d_prime = d_prime;
    traj.meta.eta = eta;
    if (cov.is_diagonal()) traj.meta.a = cov.a;
    x_hat = options.x_hat.size() ? options.x_hat : Eigen::VectorXd::Zero(d);
    traj.meta.x_hat = x_hat;
    record_full = options.record_decomposition;
    record_noise = options.record_noise || record_full;
    if ((record_full || record_noise) && !cov.is_diagonal())
      throw std::invalid_argument(
          "simulate: G/S/N decomposition requires a diagonal spectrum");
    traj.has_decomposition = record_full;
    traj.has_noise = record_noise;
    const long n = expected_steps + 1;
    traj.times.reserve(n);
    traj.weights.reserve(n);
    traj.outputs.reserve(n);
    traj.loss_population.reserve(n);
    traj.loss_test.reserve(n);
  }

  void record(long t, const Eigen::MatrixXd& W) {
    traj.times.push_back(static_cast<double>(t));
    traj.outputs.push_back(W * x_hat);
    traj.loss_population.push_back(population_loss(W, *A));
    traj.loss_test.push_back(point_loss(W, x_hat));
    if (record_full || record_noise) {
      const int d = static_cast<int>(W.rows());
      Eigen::MatrixXd g(d, d), s(d, d), n(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          TermTriple tt = decompose_entry(W, *A, i, j);
          g(i, j) = g(j, i) = tt.growth;
          s(i, j) = s(j, i) = tt.suppression;
          n(i, j) = n(j, i) = tt.noise;
        }
      if (record_full) {
        traj.growth.push_back(std::move(g));
        traj.suppression.push_back(std::move(s));
      }
      traj.noise.push_back(std::move(n));
    }
    traj.weights.push_back(W);
  }
};

void check_divergence(const Eigen::MatrixXd& W, long step, double threshold) {
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j) {
      const double v = W(i, j);
      if (!std::isfinite(v) || std::abs(v) > threshold)
        throw DivergenceError(step, i, j, v);
    }
}

}  // namespace

DivergenceError::DivergenceError(long step, int i, int j, double value)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "simulation diverged at step " << step << ": |w_" << i << "," << j
           << "| = " << value;
        return os.str();
      }()),
      step(step),
      i(i),
      j(j),
      value(value) {}

InitSpec InitSpec::uniform_magnitude(double omega, double beta,
                                     std::uint64_t sign_seed) {
  InitSpec s;
  s.mode = Mode::UniformMagnitude;
  s.omega = omega;
  s.beta = beta;
  s.sign_seed = sign_seed;
  return s;
}

InitSpec InitSpec::gaussian_u(double tau, std::uint64_t seed) {
  InitSpec s;
  s.mode = Mode::GaussianU;
  s.tau = tau;
  s.seed = seed;
  return s;
}

InitSpec InitSpec::explicit_w(Eigen::MatrixXd W0) {
  InitSpec s;
  s.mode = Mode::ExplicitW;
  s.matrix = std::move(W0);
  return s;
}

InitSpec InitSpec::explicit_u(Eigen::MatrixXd U0) {
  InitSpec s;
  s.mode = Mode::ExplicitU;
  s.matrix = std::move(U0);
  return s;
}

void TwoLayerConfig::validate() const {
  if (d <= 0) throw std::invalid_argument("TwoLayerConfig: d must be positive");
  if (d_prime < d)
    throw std::invalid_argument("TwoLayerConfig: d' must be >= d");
  if (!(eta > 0)) throw std::invalid_argument("TwoLayerConfig: eta must be > 0");
  if (steps < 0) throw std::invalid_argument("TwoLayerConfig: steps must be >= 0");
}

InitResult initialize(const InitSpec& spec, int d, int d_prime) {
  if (d <= 0 || d_prime < d)
    throw std::invalid_argument("initialize: need d > 0 and d' >= d");
  switch (spec.mode) {
    case InitSpec::Mode::ExplicitW: {
      if (spec.matrix.rows() != d || spec.matrix.cols() != d)
        throw std::invalid_argument("initialize: explicit W must be d x d");
      require_symmetric(spec.matrix, "initialize");
      return {spec.matrix, std::nullopt};
    }
    case InitSpec::Mode::ExplicitU: {
      if (spec.matrix.rows() != d || spec.matrix.cols() != d_prime)
        throw std::invalid_argument("initialize: explicit U must be d x d'");
      Eigen::MatrixXd W0 = spec.matrix * spec.matrix.transpose();
      mirror_upper(W0);
      return {std::move(W0), spec.matrix};
    }
    case InitSpec::Mode::GaussianU: {
      if (!(spec.tau > 0))
        throw std::invalid_argument("initialize: GaussianU needs tau > 0");
      Rng rng(spec.seed);
      Eigen::MatrixXd U(d, d_prime);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d_prime; ++j) U(i, j) = spec.tau * rng.normal();
      Eigen::MatrixXd W0 = U * U.transpose();
      mirror_upper(W0);
      return {std::move(W0), std::move(U)};
    }
    case InitSpec::Mode::UniformMagnitude: {
      if (!(spec.omega > 0) || !(spec.beta >= 1))
        throw std::invalid_argument(
            "initialize: UniformMagnitude needs omega > 0 and beta >= 1");
      Rng rng(spec.sign_seed);
      // Magnitudes uniform in [omega, beta * omega], positive diagonal,
      // seeded off-diagonal signs. Sign flips alone cannot reach a PSD
      // matrix when the magnitude draw itself is infeasible (for d = 2 the
      // PSD test is sign-independent), so failed attempts re-draw the
      // off-diagonal part entirely.
      Eigen::MatrixXd W0(d, d);
      for (int attempt = 0; attempt < 100; ++attempt) {
        for (int i = 0; i < d; ++i)
          W0(i, i) = rng.uniform(spec.omega, spec.beta * spec.omega);
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j) {
            const double m = rng.uniform(spec.omega, spec.beta * spec.omega);
            W0(i, j) = W0(j, i) = rng.sign() * m;
          }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W0,
                                                          Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() >= 0.0) {
          // Factor for the U-space model: d x d' with a Cholesky block.
          Eigen::MatrixXd U0 = Eigen::MatrixXd::Zero(d, d_prime);
          Eigen::LLT<Eigen::MatrixXd> llt(W0);
          if (llt.info() == Eigen::Success) {
            U0.leftCols(d) = Eigen::MatrixXd(llt.matrixL());
            return {std::move(W0), std::move(U0)};
          }
          return {std::move(W0), std::nullopt};
        }
      }
      throw std::invalid_argument(
          "initialize: UniformMagnitude found no PSD draw in 100 attempts; "
          "bias the draw toward larger diagonals (e.g. smaller beta)");
    }
  }
  throw std::invalid_argument("initialize: unknown init mode");
}

Eigen::MatrixXd drift(const Eigen::MatrixXd& W, const CovarianceSpectrum& A) {
  require_symmetric(W, "drift");
  if (W.rows() != A.dim())
    throw std::invalid_argument("drift: dimension mismatch");
  return A.is_diagonal() ? drift_diagonal(W, A.a) : drift_general(W, A.matrix);
}

TermTriple decompose_entry(const Eigen::MatrixXd& W, const CovarianceSpectrum& a,
                           int i, int j) {
  if (!a.is_diagonal())
    throw std::invalid_argument(
        "decompose_entry: defined for diagonal spectra only");
  const int d = a.dim();
  if (W.rows() != d || W.cols() != d)
    throw std::invalid_argument("decompose_entry: dimension mismatch");
  if (i < 0 || i >= d || j < 0 || j >= d)
    throw std::invalid_argument("decompose_entry: entry out of range");
  const Eigen::VectorXd& av = a.a;
  TermTriple t;
  t.growth = W(i, j) * (av[i] + av[j]);
  double s = W(i, i) * (3 * av[i] + av[j]);
  if (i != j) s += W(j, j) * (3 * av[j] + av[i]);
  t.suppression = 0.5 * W(i, j) * s;
  double n = 0;
  for (int k = 0; k < d; ++k)
    if (k != i && k != j) n += W(k, i) * W(k, j) * (av[i] + av[j] + 2 * av[k]);
  t.noise = 0.5 * n;
  return t;
}

Trajectory simulate_w_recursion(const Eigen::MatrixXd& W0, const CovarianceSpectrum& A,
                                double eta, long steps,
                                const SimulateOptions& options) {
  require_symmetric(W0, "simulate_w_recursion");
  if (W0.rows() != A.dim())
    throw std::invalid_argument("simulate_w_recursion: dimension mismatch");
  if (steps < 0)
    throw std::invalid_argument("simulate_w_recursion: steps must be >= 0");
  check_stability(eta, A, options, "simulate_w_recursion");

  const int d = A.dim();
  Recorder rec;
  rec.init(ModelKind::TwoLayerW, d, 0, eta, A, options, steps);

  Eigen::MatrixXd W = W0;
  mirror_upper(W);
  long remaining_after_stop = -1;
  for (long t = 0;; ++t) {
    rec.record(t, W);
    if (t == steps) break;
    if (options.stop_diag_floor >= 0) {
      if (remaining_after_stop < 0 &&
          W.diagonal().minCoeff() >= options.stop_diag_floor)
        remaining_after_stop = options.stop_extra_steps;
      else if (remaining_after_stop > 0)
        --remaining_after_stop;
      if (remaining_after_stop == 0) break;
    }
    W += eta * (A.is_diagonal() ? drift_diagonal(W, A.a)
                                : drift_general(W, A.matrix));
    check_divergence(W, t + 1, options.divergence_threshold);
  }
  return std::move(rec.traj);
}

Trajectory simulate_u_descent(const Eigen::MatrixXd& U0, const CovarianceSpectrum& A,
                              double eta, long steps,
                              const SimulateOptions& options) {
  const int d = A.dim();
  if (U0.rows() != d)
    throw std::invalid_argument("simulate_u_descent: U must have d rows");
  if (U0.cols() < U0.rows())
    throw std::invalid_argument("simulate_u_descent: U needs d' >= d columns");
  if (steps < 0)
    throw std::invalid_argument("simulate_u_descent: steps must be >= 0");
  check_stability(eta, A, options, "simulate_u_descent");

  Recorder rec;
  rec.init(ModelKind::TwoLayerU, d, static_cast<int>(U0.cols()), eta, A, options,
           steps);

  Eigen::MatrixXd U = U0;
  long remaining_after_stop = -1;
  for (long t = 0;; ++t) {
    Eigen::MatrixXd W = U * U.transpose();
    mirror_upper(W);
    rec.record(t, W);
    if (t == steps) break;
    if (options.stop_diag_floor >= 0) {
      if (remaining_after_stop < 0 &&
          W.diagonal().minCoeff() >= options.stop_diag_floor)
        remaining_after_stop = options.stop_extra_steps;
      else if (remaining_after_stop > 0)
        --remaining_after_stop;
      if (remaining_after_stop == 0) break;
    }
    Eigen::MatrixXd M = W - Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd S;
    if (A.is_diagonal()) {
      S = M;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) S(i, j) *= 0.5 * (A.a[i] + A.a[j]);
    } else {
      S = 0.5 * (A.matrix * M + M * A.matrix);
    }
    U.noalias() -= eta * (S * U);
    for (int i = 0; i < U.rows(); ++i)
      for (int j = 0; j < U.cols(); ++j)
        if (!std::isfinite(U(i, j)) ||
            std::abs(U(i, j)) > options.divergence_threshold)
          throw DivergenceError(t + 1, i, j, U(i, j));
  }
  return std::move(rec.traj);
}

}  // namespace simlab
