#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rsmm/model.hpp"

namespace rsmm {

struct Quadrature1D {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> nodes;    // increasing, interior
  std::vector<double> weights;  // sum to hi - lo

  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule with n nodes on [lo, hi]; throws std::domain_error for n = 0.
Quadrature1D gauss_legendre(std::size_t n, double lo = -1.0, double hi = 1.0);

// Tensor-product rule on the quote rectangle carrying the uniform reference law.
class ActionGrid {
 public:
  ActionGrid(std::size_t nodes_per_side, double lo, double hi);
  ActionGrid(std::size_t nodes_per_side, const ModelParams& p)
      : ActionGrid(nodes_per_side, p.quote_lo, p.quote_hi) {}

  std::size_t size() const { return nodes_.size(); }  // per coordinate
  std::size_t total() const { return size() * size(); }
  double node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  // probability weight of node i in one coordinate; weights sum to 1
  double prob(std::size_t i) const { return prob_[i]; }
  const std::vector<double>& probs() const { return prob_; }
  double weight(std::size_t i, std::size_t j) const { return prob_[i] * prob_[j]; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
  std::vector<double> nodes_;
  std::vector<double> prob_;
};

double expectation_under_nu(const std::function<double(const Quote&)>& f, const ActionGrid& grid);

// max-shifted lambda * log sum_i p_i exp(s_i / lambda)
double weighted_lse(const std::vector<double>& scores, const std::vector<double>& probs, double lambda);

double soft_hamiltonian(int q, const ValueVector& y, double lambda, const ActionGrid& grid, const Model& m);

struct HardMax {
  double value = 0.0;
  Quote argmax;
};

HardMax hard_hamiltonian(int q, const ValueVector& y, const ActionGrid& grid, const Model& m);

// maximiser of fill_gain on one side for neighbor difference d (closed form or
// grid search + golden section)
double side_argmax(Side s, double d, const ActionGrid& grid, const Model& m);

ValueVector soft_field(const ValueVector& y, double lambda, const ActionGrid& grid, const Model& m);
ValueVector hard_field(const ValueVector& y, const ActionGrid& grid, const Model& m);

}  // namespace rsmm
