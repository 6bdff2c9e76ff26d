#include "rsmm/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace rsmm {

namespace {

constexpr int kDegree = 6;

// c_j = (2q - j)! q! / ((2q)! j! (q - j)!)
constexpr double kPade[kDegree + 1] = {1.0,
                                      1.0 / 2.0,
                                      5.0 / 44.0,
                                      1.0 / 66.0,
                                      1.0 / 792.0,
                                      1.0 / 15840.0,
                                      1.0 / 665280.0};

// relative truncation bound of the [q/q] approximant for ||X|| = theta:
// 8 (q!)^2 / ((2q)! (2q+1)!) theta^(2q+1)
double pade_bound(double theta) {
  const double c = 8.0 * 518400.0 / (479001600.0 * 6227020800.0);
  return c * std::pow(theta, 2 * kDegree + 1);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exponential: matrix must be square");
  if (!a.allFinite()) throw std::invalid_argument("matrix_exponential: non-finite entry");
  if (!(tol > 0.0)) throw std::invalid_argument("matrix_exponential: tol must be > 0");
  const auto n = a.rows();
  if (n == 0) return a;

  double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  while (pade_bound(std::ldexp(norm, -s)) > tol && s < 1100) ++s;
  if (s > 1023) throw std::overflow_error("matrix_exponential: norm too large to scale");

  Eigen::MatrixXd x = a * std::ldexp(1.0, -s);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd p = x;
  Eigen::MatrixXd num = id + kPade[1] * x;
  Eigen::MatrixXd den = id - kPade[1] * x;
  for (int j = 2; j <= kDegree; ++j) {
    p = p * x;
    num += kPade[j] * p;
    den += (j % 2 == 0 ? 1.0 : -1.0) * kPade[j] * p;
  }
  Eigen::MatrixXd e = den.partialPivLu().solve(num);
  for (int i = 0; i < s; ++i) e = e * e;
  if (!e.allFinite()) throw std::overflow_error("matrix_exponential: result overflow");
  return e;
}

}  // namespace rsmm
