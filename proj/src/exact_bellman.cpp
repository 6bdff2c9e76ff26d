#include "rsmm/exact_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rsmm/csv.hpp"
#include "rsmm/expm.hpp"

namespace rsmm {

GeneratorMatrix::GeneratorMatrix(const Quote& delta, const Model& m) : q_max_(m.q_max()) {
  m.check_quote(delta);
  const auto& p = m.params();
  const int n = m.dim();
  const double g = p.gamma;
  k_ = Eigen::MatrixXd::Zero(n, n);
  double la = m.intensity(Side::ask, delta.ask);
  double lb = m.intensity(Side::bid, delta.bid);
  for (int q = -q_max_; q <= q_max_; ++q) {
    int i = q + q_max_;
    double q2 = static_cast<double>(q) * q;
    double diag = 0.5 * g * g * p.sigma * p.sigma * q2 + g * p.eta * q2;
    if (m.active(Side::ask, q)) {
      diag -= la;
      k_(i, i - 1) = la * std::exp(-g * delta.ask);
    }
    if (m.active(Side::bid, q)) {
      diag -= lb;
      k_(i, i + 1) = lb * std::exp(-g * delta.bid);
    }
    k_(i, i) = diag;
  }
}

GeneratorMatrix build_generator(const Quote& delta, const Model& m) { return GeneratorMatrix(delta, m); }

double ce_from_propagator(const Eigen::MatrixXd& e, const ValueVector& phi, int q, double gamma) {
  const int qm = phi.q_max();
  double lo = phi.min();
  Eigen::VectorXd u(static_cast<Eigen::Index>(phi.size()));
  for (int r = -qm; r <= qm; ++r) u(r + qm) = std::exp(-gamma * (phi[r] - lo));
  double w = e.row(q + qm).dot(u);
  if (!(w > 0.0) || !std::isfinite(w))
    throw std::runtime_error("ce_score: non-positive Feynman-Kac expectation at q=" + std::to_string(q));
  return lo - std::log(w) / gamma;
}

double ce_score(const ValueVector& phi, const Quote& delta, double h, int q, const Model& m) {
  if (!(h > 0.0)) throw std::domain_error("ce_score: h must be > 0");
  m.check_inventory(q);
  m.check_vector(phi);
  Eigen::MatrixXd e = matrix_exponential(h * build_generator(delta, m).matrix());
  return ce_from_propagator(e, phi, q, m.gamma());
}

ExactBellman::ExactBellman(const Model& m, const ActionGrid& actions, double h, double lambda)
    : model_(m), actions_(actions), h_(h), lambda_(lambda) {
  if (!(h > 0.0)) throw std::domain_error("ExactBellman: h must be > 0");
  if (!(lambda > 0.0)) throw std::domain_error("ExactBellman: lambda must be > 0");
  const std::size_t n = actions_.size();
  prop_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      prop_.push_back(matrix_exponential(h * build_generator({actions_.node(i), actions_.node(j)}, m).matrix()));
}

std::vector<std::vector<double>> ExactBellman::scores(const ValueVector& phi) const {
  model_.check_vector(phi);
  const int qm = phi.q_max();
  const double g = model_.gamma();
  double lo = phi.min();
  Eigen::VectorXd u(static_cast<Eigen::Index>(phi.size()));
  for (int r = -qm; r <= qm; ++r) u(r + qm) = std::exp(-g * (phi[r] - lo));
  std::vector<std::vector<double>> out(prop_.size(), std::vector<double>(phi.size()));
  for (std::size_t k = 0; k < prop_.size(); ++k) {
    Eigen::VectorXd w = prop_[k] * u;
    for (int q = -qm; q <= qm; ++q) {
      double x = w(q + qm);
      if (!(x > 0.0) || !std::isfinite(x))
        throw std::runtime_error("ExactBellman: non-positive Feynman-Kac expectation at q=" + std::to_string(q));
      out[k][static_cast<std::size_t>(q + qm)] = lo - std::log(x) / g;
    }
  }
  return out;
}

ValueVector ExactBellman::apply_from_scores(const std::vector<std::vector<double>>& sc) const {
  const int qm = model_.q_max();
  const std::size_t n = actions_.size();
  std::vector<double> probs(n * n), s(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) probs[i * n + j] = actions_.weight(i, j);
  ValueVector out(qm);
  for (int q = -qm; q <= qm; ++q) {
    for (std::size_t k = 0; k < n * n; ++k) s[k] = sc[k][static_cast<std::size_t>(q + qm)];
    out[q] = weighted_lse(s, probs, h_ * lambda_);
  }
  return out;
}

ValueVector ExactBellman::apply(const ValueVector& phi) const { return apply_from_scores(scores(phi)); }

ValueVector bellman_operator(const ValueVector& phi, double h, double lambda, const ActionGrid& actions,
                             const Model& m) {
  return ExactBellman(m, actions, h, lambda).apply(phi);
}

BellmanTable bellman_recursion(const ExactBellman& op, const Model& m) {
  TimeGrid grid = TimeGrid::from_step(m.params().horizon, op.step());
  const int N = grid.steps();
  BellmanTable t{grid, op.lambda(), std::vector<ValueVector>(static_cast<std::size_t>(N) + 1)};
  t.rows[N] = m.terminal();
  for (int n = N - 1; n >= 0; --n) t.rows[n] = op.apply(t.rows[n + 1]);
  return t;
}

BellmanTable bellman_recursion(double h, double lambda, const ActionGrid& actions, const Model& m) {
  return bellman_recursion(ExactBellman(m, actions, h, lambda), m);
}

std::vector<double> gibbs_weights(const std::vector<double>& s, const std::vector<double>& p, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("gibbs_weights: temperature must be > 0");
  double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> w(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    w[i] = p[i] * std::exp((s[i] - mx) / tau);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

double variational_objective(const std::vector<double>& s, const std::vector<double>& p,
                             const std::vector<double>& pi, double tau) {
  double mean = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (pi[i] <= 0.0) continue;
    mean += pi[i] * s[i];
    kl += pi[i] * std::log(pi[i] / p[i]);
  }
  return mean - tau * kl;
}

double variational_gap(const std::vector<double>& s, const std::vector<double>& p, double tau) {
  return std::abs(weighted_lse(s, p, tau) - variational_objective(s, p, gibbs_weights(s, p, tau), tau));
}

double variational_check(const ValueVector& phi, int q, const ExactBellman& op) {
  op.model().check_inventory(q);
  auto sc = op.scores(phi);
  const std::size_t n = op.actions().size();
  std::vector<double> s(n * n), p(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s[i * n + j] = sc[i * n + j][static_cast<std::size_t>(q + phi.q_max())];
      p[i * n + j] = op.actions().weight(i, j);
    }
  return variational_gap(s, p, op.step() * op.lambda());
}

void write_bellman_csv(std::ostream& os, const BellmanTable& table) {
  write_trajectory_csv(os, table.as_trajectory());
}

}  // namespace rsmm
