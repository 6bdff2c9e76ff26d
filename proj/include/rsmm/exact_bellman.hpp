#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "rsmm/model.hpp"
#include "rsmm/ode.hpp"
#include "rsmm/quadrature.hpp"

namespace rsmm {

// Tridiagonal generator of the frozen-quote exponential Feynman-Kac system.
class GeneratorMatrix {
 public:
  GeneratorMatrix(const Quote& delta, const Model& m);
  const Eigen::MatrixXd& matrix() const { return k_; }
  int q_max() const { return q_max_; }
  double operator()(int q, int r) const { return k_(q + q_max_, r + q_max_); }

 private:
  int q_max_;
  Eigen::MatrixXd k_;
};

GeneratorMatrix build_generator(const Quote& delta, const Model& m);

// -(1/gamma) log (E u)_q with u = exp(-gamma (phi - min phi)), shifted back
double ce_from_propagator(const Eigen::MatrixXd& e, const ValueVector& phi, int q, double gamma);

double ce_score(const ValueVector& phi, const Quote& delta, double h, int q, const Model& m);

// Exact CE-score Bellman operator with exp(hK) cached per action node.
class ExactBellman {
 public:
  ExactBellman(const Model& m, const ActionGrid& actions, double h, double lambda);

  const ActionGrid& actions() const { return actions_; }
  double step() const { return h_; }
  double lambda() const { return lambda_; }
  const Model& model() const { return model_; }
  const Eigen::MatrixXd& propagator(std::size_t i, std::size_t j) const {
    return prop_[i * actions_.size() + j];
  }

  // scores[i * n + j][q + Q] = C_h^{delta_ij} phi (q)
  std::vector<std::vector<double>> scores(const ValueVector& phi) const;
  ValueVector apply(const ValueVector& phi) const;
  ValueVector apply_from_scores(const std::vector<std::vector<double>>& scores) const;

 private:
  Model model_;
  ActionGrid actions_;
  double h_, lambda_;
  std::vector<Eigen::MatrixXd> prop_;
};

ValueVector bellman_operator(const ValueVector& phi, double h, double lambda, const ActionGrid& actions,
                             const Model& m);

struct BellmanTable {
  TimeGrid grid;
  double lambda;
  std::vector<ValueVector> rows;  // rows[n] = v_n, n = 0..N

  const ValueVector& at(int n) const { return rows.at(static_cast<std::size_t>(n)); }
  Trajectory as_trajectory() const { return Trajectory{grid, rows}; }
};

BellmanTable bellman_recursion(const ExactBellman& op, const Model& m);
BellmanTable bellman_recursion(double h, double lambda, const ActionGrid& actions, const Model& m);

// Gibbs law over a discrete action set for score s, reference weights p and temperature tau.
std::vector<double> gibbs_weights(const std::vector<double>& scores, const std::vector<double>& probs, double tau);
// mean score under pi minus tau * KL(pi || p)
double variational_objective(const std::vector<double>& scores, const std::vector<double>& probs,
                             const std::vector<double>& pi, double tau);
// |LSE - objective at the Gibbs law|
double variational_gap(const std::vector<double>& scores, const std::vector<double>& probs, double tau);

double variational_check(const ValueVector& phi, int q, const ExactBellman& op);

void write_bellman_csv(std::ostream& os, const BellmanTable& table);

}  // namespace rsmm
