#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "simlab/covariance.hpp"
#include "simlab/dataset.hpp"
#include "simlab/losses.hpp"
#include "simlab/rng.hpp"
#include "simlab/sim_config.hpp"

using namespace simlab;

namespace {

SimConfig make_config(int d, int s, std::vector<double> mu, std::vector<double> sigma,
                      int n = 1) {
  SimConfig c;
  c.d = d;
  c.s = s;
  c.n = n;
  c.mu = Eigen::VectorXd::Zero(d);
  c.sigma = Eigen::VectorXd::Zero(d);
  for (size_t i = 0; i < mu.size(); ++i) c.mu[static_cast<int>(i)] = mu[i];
  for (size_t i = 0; i < sigma.size(); ++i) c.sigma[static_cast<int>(i)] = sigma[i];
  return c;
}

}  // namespace

TEST_CASE("config validation rejects bad shapes") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.05, 0.05});
  CHECK_NOTHROW(c.validate());
  c.s = 5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.s = 2;
  c.mu[3] = 1.0;  // support violation
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.mu[3] = 0.0;
  c.sigma[0] = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("true covariance matches a_p = sigma_p^2 + mu_p^2 / s") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.05, 0.05});
  CovarianceSpectrum cov = build_covariance(c);
  REQUIRE(cov.is_diagonal());
  CHECK(cov.a[0] == doctest::Approx(0.5025).epsilon(1e-15));
  CHECK(cov.a[1] == doctest::Approx(2.0025).epsilon(1e-15));
  CHECK(cov.a[2] == 0.0);
  CHECK(cov.a[3] == 0.0);
}

TEST_CASE("zero data gives a zero spectrum") {
  SimConfig c = make_config(3, 2, {0, 0}, {0, 0});
  CHECK(build_covariance(c).a.isZero(0));
}

TEST_CASE("fig 2a configuration") {
  SimConfig c = make_config(2, 2, {1, 2}, {0.05, 0.05});
  CovarianceSpectrum cov = build_covariance(c);
  CHECK(cov.a[0] == doctest::Approx(0.5025).epsilon(1e-15));
  CHECK(cov.a[1] == doctest::Approx(2.0025).epsilon(1e-15));
}

TEST_CASE("origin cluster switches the divisor to s + 1") {
  SimConfig c = make_config(2, 2, {1, 2}, {0.1, 0.1});
  c.include_origin_cluster = true;
  CovarianceSpectrum cov = build_covariance(c);
  CHECK(cov.a[0] == doctest::Approx(0.01 + 1.0 / 3.0).epsilon(1e-15));
  CHECK(cov.a[1] == doctest::Approx(0.01 + 4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("sigma to zero reduces a_p to mu_p^2 / s exactly") {
  SimConfig c = make_config(5, 3, {1, 2, 3}, {0, 0, 0});
  CovarianceSpectrum cov = build_covariance(c);
  CHECK(cov.a[0] == 1.0 / 3.0);
  CHECK(cov.a[1] == 4.0 / 3.0);
  CHECK(cov.a[2] == 3.0);
}

TEST_CASE("rotated configs are rejected by build_covariance") {
  SimConfig c = make_config(3, 2, {1, 2}, {0.1, 0.1});
  c.rotation_seed = 7;
  CHECK_THROWS_AS(build_covariance(c), std::invalid_argument);
}

TEST_CASE("degenerate sigma gives exact point-mass clusters") {
  SimConfig c = make_config(3, 2, {1, 2}, {0, 0}, 4);
  Dataset data = sample_dataset(c, 123);
  REQUIRE(data.size() == 8);
  for (int i = 0; i < data.size(); ++i) {
    int p = data.cluster_of[i];
    for (int q = 0; q < 3; ++q)
      CHECK(data.points(i, q) == (q == p ? c.mu[p] : 0.0));
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.3, 0.2}, 16);
  Dataset a = sample_dataset(c, 99);
  Dataset b = sample_dataset(c, 99);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  Dataset other = sample_dataset(c, 100);
  CHECK((a.points - other.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("origin cluster contributes n extra points labeled s") {
  SimConfig c = make_config(3, 2, {1, 2}, {0.1, 0.1}, 5);
  c.include_origin_cluster = true;
  Dataset data = sample_dataset(c, 3);
  REQUIRE(data.size() == 15);
  int origin = 0;
  for (int i = 0; i < data.size(); ++i)
    if (data.cluster_of[i] == 2) ++origin;
  CHECK(origin == 5);
}

TEST_CASE("empirical covariance of a single axis point") {
  Dataset d;
  d.points = Eigen::MatrixXd::Zero(1, 3);
  d.points(0, 0) = 1.0;
  d.cluster_of = {0};
  CovarianceSpectrum cov = empirical_covariance(d);
  CHECK(cov.matrix(0, 0) == 1.0);
  CHECK(cov.matrix.cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(empirical_covariance(Dataset{}), std::invalid_argument);
}

TEST_CASE("empirical covariance converges to the true diagonal") {
  // N = 5000 per cluster; entrywise deviation within 5 standard errors in at
  // least 99 of 100 seeded trials.
  SimConfig c = make_config(2, 2, {1, 2}, {0.05, 0.05}, 5000);
  CovarianceSpectrum truth = build_covariance(c);
  int ok = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    Dataset data = sample_dataset(c, 1000 + trial);
    CovarianceSpectrum emp = empirical_covariance(data);
    const int n = data.size();
    bool good = true;
    for (int i = 0; i < 2 && good; ++i)
      for (int j = 0; j < 2 && good; ++j) {
        // Standard error of the (i,j) entry from the sample variance of
        // the products x_i x_j.
        double mean = emp.matrix(i, j);
        double var = 0;
        for (int k = 0; k < n; ++k) {
          double prod = data.points(k, i) * data.points(k, j);
          var += (prod - mean) * (prod - mean);
        }
        var /= static_cast<double>(n - 1);
        double se = std::sqrt(var / n);
        double target = i == j ? truth.a[i] : 0.0;
        if (std::abs(mean - target) > 5.0 * se) good = false;
      }
    if (good) ++ok;
    CHECK((emp.matrix - truth.dense()).cwiseAbs().maxCoeff() < 0.05);
  }
  CHECK(ok >= 99);
}

TEST_CASE("test points combine cluster means") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.05, 0.05});
  Eigen::VectorXd ones = test_point(TestIndex::ones(2), c);
  CHECK(ones[0] == 1.0);
  CHECK(ones[1] == 2.0);
  CHECK(ones[2] == 0.0);
  CHECK(test_point(TestIndex::zeros(2), c).isZero(0));
  // |v| = 1 gives the center of one training cluster.
  Eigen::VectorXd second = test_point(TestIndex::from_mask(0b10, 2), c);
  CHECK(second[0] == 0.0);
  CHECK(second[1] == 2.0);
  TestIndex bad{{1, 0, 1}};
  CHECK_THROWS_AS(test_point(bad, c), std::invalid_argument);
}

TEST_CASE("population loss closed forms") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.05, 0.05});
  CovarianceSpectrum cov = build_covariance(c);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  CHECK(population_loss(I, cov) == 0.0);
  CHECK(population_loss(Eigen::MatrixXd::Zero(4, 4), cov) ==
        doctest::Approx(0.5 * cov.a.sum()).epsilon(1e-15));

  CovarianceSpectrum scalar = CovarianceSpectrum::true_diagonal(
      (Eigen::VectorXd(1) << 2.0).finished());
  Eigen::MatrixXd W(1, 1);
  W << 0.5;
  CHECK(population_loss(W, scalar) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("population loss vanishes iff W acts as identity on the support") {
  SimConfig c = make_config(4, 2, {1, 2}, {0.05, 0.05});
  CovarianceSpectrum cov = build_covariance(c);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 4);
  W(0, 0) = W(1, 1) = 1.0;
  W(2, 3) = 0.7;  // off the support, does not matter
  W(3, 3) = -2.0;
  CHECK(population_loss(W, cov) == 0.0);
  W(0, 1) = 0.1;  // column 1 carries weight
  CHECK(population_loss(W, cov) > 0.0);
}

TEST_CASE("point loss closed forms") {
  SimConfig c = make_config(3, 2, {1, 2}, {0.05, 0.05});
  Eigen::VectorXd x = test_point(c);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  CHECK(point_loss(I, x) == 0.0);
  CHECK(point_loss(Eigen::MatrixXd::Zero(3, 3), x) ==
        doctest::Approx(2.5).epsilon(1e-15));
  CHECK(point_loss(Eigen::MatrixXd::Random(3, 3), Eigen::VectorXd::Zero(3)) == 0.0);
}

TEST_CASE("population loss equals the Monte-Carlo per-point expectation") {
  SimConfig c = make_config(3, 2, {1.0, 2.0}, {0.3, 0.2}, 4000);
  CovarianceSpectrum cov = build_covariance(c);
  Rng rng(5);
  Eigen::MatrixXd W(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) W(i, j) = 0.4 * rng.normal();
  const double expected = population_loss(W, cov);

  Dataset data = sample_dataset(c, 77);
  double mean = 0, m2 = 0;
  for (int k = 0; k < data.size(); ++k) {
    Eigen::VectorXd x = data.points.row(k).transpose();
    double l = point_loss(W, x);
    double delta = l - mean;
    mean += delta / (k + 1);
    m2 += delta * (l - mean);
  }
  double se = std::sqrt(m2 / (data.size() - 1) / data.size());
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("rotation invariance of the population loss") {
  SimConfig plain = make_config(4, 2, {1, 2}, {0.2, 0.1}, 500);
  SimConfig rotated = plain;
  rotated.rotation_seed = 31;

  Eigen::MatrixXd r = haar_orthogonal(4, 31);
  CHECK((r * r.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-12);

  Rng rng(8);
  Eigen::MatrixXd W(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) W(i, j) = 0.3 * rng.normal();

  Dataset d_plain = sample_dataset(plain, 444);
  Dataset d_rot = sample_dataset(rotated, 444);
  CovarianceSpectrum a_plain = empirical_covariance(d_plain);
  CovarianceSpectrum a_rot = empirical_covariance(d_rot);
  double lhs = population_loss(r * W * r.transpose(), a_rot);
  double rhs = population_loss(W, a_plain);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  CHECK((test_point(rotated) - r * test_point(plain)).norm() < 1e-12);
}
