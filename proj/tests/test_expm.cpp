#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rsmm/expm.hpp"

using namespace rsmm;

namespace {

// scaled Taylor series with repeated squaring
Eigen::MatrixXd taylor_exp(const Eigen::MatrixXd& a) {
  int s = 8;
  Eigen::MatrixXd b = a / std::ldexp(1.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 60; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("zero and diagonal matrices") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 5);
  CHECK((matrix_exponential(z) - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
  Eigen::VectorXd d(4);
  d << -3.0, 0.0, 0.5, 2.0;
  Eigen::MatrixXd e = matrix_exponential(d.asDiagonal().toDenseMatrix());
  for (int i = 0; i < 4; ++i) CHECK(e(i, i) == doctest::Approx(std::exp(d(i))).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) < 1e-300);
}

TEST_CASE("nilpotent and rotation") {
  Eigen::MatrixXd n(2, 2);
  n << 0.0, 1.0, 0.0, 0.0;
  Eigen::MatrixXd e = matrix_exponential(n);
  CHECK(e(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e(1, 0) == 0.0);
  Eigen::MatrixXd r(2, 2);
  r << 0.0, -2.0, 2.0, 0.0;
  Eigen::MatrixXd er = matrix_exponential(r);
  CHECK(er(0, 0) == doctest::Approx(std::cos(2.0)).epsilon(1e-13));
  CHECK(er(1, 0) == doctest::Approx(std::sin(2.0)).epsilon(1e-13));
}

TEST_CASE("random tridiagonal against the Taylor oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int it = 0; it < 25; ++it) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(11, 11);
    for (int i = 0; i < 11; ++i) {
      a(i, i) = u(gen);
      if (i > 0) a(i, i - 1) = u(gen);
      if (i < 10) a(i, i + 1) = u(gen);
    }
    Eigen::MatrixXd e = matrix_exponential(a);
    Eigen::MatrixXd t = taylor_exp(a);
    CHECK((e - t).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, t.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("semigroup property") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 6);
  Eigen::MatrixXd e1 = matrix_exponential(a);
  Eigen::MatrixXd e2 = matrix_exponential(2.0 * a);
  CHECK((e1 * e1 - e2).cwiseAbs().maxCoeff() <= 1e-12 * e2.cwiseAbs().maxCoeff());
}

TEST_CASE("overflow is reported") {
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(3, 3) * 1000.0;
  CHECK_THROWS_AS(matrix_exponential(big), std::overflow_error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(matrix_exponential(bad), std::invalid_argument);
}
