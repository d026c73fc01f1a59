#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "simlab/covariance.hpp"
#include "simlab/one_layer.hpp"
#include "simlab/phenomena.hpp"
#include "simlab/rng.hpp"

using namespace simlab;

namespace {

CovarianceSpectrum diag(std::initializer_list<double> values) {
  Eigen::VectorXd a(static_cast<int>(values.size()));
  int k = 0;
  for (double v : values) a[k++] = v;
  return CovarianceSpectrum::true_diagonal(std::move(a));
}

Eigen::MatrixXd random_w(int d, std::uint64_t seed, double scale) {
  Rng rng(seed);
  Eigen::MatrixXd W(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) W(i, j) = scale * (2 * rng.uniform01() - 1);
  return W;
}

}  // namespace

TEST_CASE("closed form reproduces W0 at t = 0") {
  CovarianceSpectrum a = diag({0.5, 2.0, 0.0});
  Eigen::MatrixXd W0 = random_w(3, 11, 0.5);
  CHECK((analytic_solution_matrix(W0, a, 0.0) - W0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed form converges to identity on active columns") {
  CovarianceSpectrum a = diag({0.5025, 2.0025, 0.0, 0.0});
  Eigen::MatrixXd W0 = random_w(4, 3, 0.01);
  const double t = 1e6 / 0.5025;
  Eigen::MatrixXd W = analytic_solution_matrix(W0, a, t);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(W(i, j) - (i == j ? 1.0 : 0.0)) < 1e-9);
  // Columns with a_j = 0 are frozen at W0 by the 0 * 0^-1 = 0 convention.
  for (int i = 0; i < 4; ++i)
    for (int j = 2; j < 4; ++j) CHECK(W(i, j) == W0(i, j));
}

TEST_CASE("scalar solution 1 - exp(-t)") {
  CovarianceSpectrum a = diag({1.0});
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd W = analytic_solution_matrix(W0, a, std::log(2.0));
  CHECK(W(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("closed form rejects empirical spectra and bad t") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  CovarianceSpectrum emp = CovarianceSpectrum::empirical(m);
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(analytic_solution_matrix(W0, emp, 1.0), std::invalid_argument);
  CovarianceSpectrum a = diag({1.0, 1.0});
  CHECK_THROWS_AS(analytic_solution_matrix(W0, a, -1.0), std::invalid_argument);
}

TEST_CASE("output decomposition at t = 0 is pure noise") {
  CovarianceSpectrum a = diag({0.5, 2.0});
  Eigen::MatrixXd W0 = random_w(2, 4, 0.3);
  Eigen::VectorXd z(2);
  z << 1.0, -0.5;
  OutputDecomposition out = analytic_output(W0, a, z, 0.0);
  CHECK(out.growth.isZero(0));
  CHECK((out.noise - W0 * z).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((out.total - W0 * z).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("output at t = 1 from zero init matches the frozen values") {
  // Fig. 2(a) configuration, growth term only.
  CovarianceSpectrum a = diag({0.5025, 2.0025});
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  OutputDecomposition out = analytic_output(W0, a, z, 1.0);
  CHECK(out.total[0] == doctest::Approx(0.39498377310685673).epsilon(1e-14));
  CHECK(out.total[1] == doctest::Approx(1.7300052648018684).epsilon(1e-14));
  CHECK(out.noise.isZero(0));
}

TEST_CASE("output converges to the supported part of z") {
  CovarianceSpectrum a = diag({0.5, 1.5, 0.0});
  Eigen::MatrixXd W0 = random_w(3, 6, 0.01);
  W0.col(2).setZero();  // keep frozen columns out of the limit
  Eigen::VectorXd z(3);
  z << 1.0, 2.0, 0.0;
  OutputDecomposition out = analytic_output(W0, a, z, 5e3);
  CHECK(out.total[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.total[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(out.total[2]) < 1e-12);
}

TEST_CASE("decomposition identity growth + noise = total = W(t) z") {
  CovarianceSpectrum a = diag({0.7, 1.3, 0.0, 2.2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd W0 = random_w(4, seed, 0.8);
    Rng rng(seed + 100);
    Eigen::VectorXd z(4);
    for (int k = 0; k < 4; ++k) z[k] = 2 * rng.uniform01() - 1;
    const double t = 3.0 * rng.uniform01();
    OutputDecomposition out = analytic_output(W0, a, z, t);
    CHECK((out.growth + out.noise - out.total).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::VectorXd direct = analytic_solution_matrix(W0, a, t) * z;
    CHECK((out.total - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("euler reference: zero spectrum freezes the trajectory") {
  CovarianceSpectrum a = diag({0.0, 0.0});
  Eigen::MatrixXd W0 = random_w(2, 9, 1.0);
  EulerResult res = euler_reference(W0, a, 0.1, 1.0);
  for (const auto& W : res.weights)
    CHECK((W - W0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("euler reference single step") {
  CovarianceSpectrum a = diag({1.0});
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(1, 1);
  EulerResult res = euler_reference(W0, a, 0.1, 0.1);
  REQUIRE(res.weights.size() == 2);
  CHECK(res.weights.back()(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("euler reference rejects unstable steps") {
  CovarianceSpectrum a = diag({10.0});
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(euler_reference(W0, a, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("euler converges to the closed form at first order") {
  CovarianceSpectrum a = diag({0.5, 1.7, 0.9});
  Eigen::MatrixXd W0 = random_w(3, 13, 0.01);
  Eigen::MatrixXd exact = analytic_solution_matrix(W0, a, 1.0);
  auto terminal_error = [&](double step) {
    EulerResult res = euler_reference(W0, a, step, 1.0, 1 << 20);
    return (res.weights.back() - exact).cwiseAbs().maxCoeff();
  };
  double e1 = terminal_error(1e-3);
  double e2 = terminal_error(5e-4);
  CHECK(e1 < 1e-2);
  double ratio = e1 / e2;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
  CHECK(terminal_error(1e-5) < 1e-4);
}

TEST_CASE("euler accepts a general symmetric spectrum") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.3, 0.3, 0.5;
  CovarianceSpectrum emp = CovarianceSpectrum::empirical(m);
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(2, 2);
  EulerResult res = euler_reference(W0, emp, 1e-3, 24.0, 1 << 20);
  // Both eigenvalues are positive, so W approaches the identity.
  CHECK((res.weights.back() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-2);
}

TEST_CASE("time_to_fraction closed form") {
  CHECK(time_to_fraction(1.0, 1.0 - std::exp(-1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(time_to_fraction(2.0025, 0.9) ==
        doctest::Approx(1.1498552274626945).epsilon(1e-14));
  // Doubling the rate halves the time exactly.
  CHECK(time_to_fraction(2.0, 0.37) == doctest::Approx(time_to_fraction(1.0, 0.37) / 2)
                                           .epsilon(1e-15));
  CHECK(std::isinf(time_to_fraction(0.0, 0.5)));
  CHECK_THROWS_AS(time_to_fraction(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("growth term is nondecreasing and slowdown is monotone") {
  CovarianceSpectrum a = diag({0.5025, 2.0025});
  Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  Trajectory traj = sample_analytic_trajectory(W0, a, z, 10.0, 0.05);

  double prev0 = -1, prev1 = -1;
  for (long t = 0; t < traj.steps(); ++t) {
    OutputDecomposition out = analytic_output(W0, a, z, traj.times[t]);
    CHECK(out.growth[0] >= prev0);
    CHECK(out.growth[1] >= prev1);
    prev0 = out.growth[0];
    prev1 = out.growth[1];
  }

  // Terminal slowdown: the speed profile decreases strictly from the start.
  std::vector<double> speeds = slowdown_profile(traj, 1);
  for (size_t i = 1; i < speeds.size(); ++i) CHECK(speeds[i] < speeds[i - 1]);
}

TEST_CASE("noise term is bounded by its initial magnitude sum") {
  CovarianceSpectrum a = diag({0.4, 1.1, 2.3});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd W0 = random_w(3, seed + 40, 0.6);
    Rng rng(seed);
    Eigen::VectorXd z(3);
    for (int k = 0; k < 3; ++k) z[k] = 2 * rng.uniform01() - 1;
    for (double t : {0.0, 0.1, 0.7, 2.0, 9.0}) {
      OutputDecomposition out = analytic_output(W0, a, z, t);
      for (int k = 0; k < 3; ++k) {
        double cap = 0;
        for (int i = 0; i < 3; ++i) cap += std::abs(W0(k, i) * z[i]);
        CHECK(std::abs(out.noise[k]) <= cap + 1e-15);
      }
    }
  }
}
