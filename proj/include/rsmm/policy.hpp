#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rsmm/exact_bellman.hpp"
#include "rsmm/model.hpp"
#include "rsmm/ode.hpp"
#include "rsmm/quadrature.hpp"

namespace rsmm {

// Discrete quote law on the nodes of an ActionGrid; either a product of two
// marginals or a dense joint table indexed [i * n + j] (i ask, j bid).
class QuoteLaw {
 public:
  static QuoteLaw product(std::vector<double> ask, std::vector<double> bid);
  static QuoteLaw joint(std::size_t n, std::vector<double> weights);

  std::size_t size() const { return n_; }
  bool is_product() const { return joint_.empty(); }
  double weight(std::size_t i, std::size_t j) const;
  std::vector<double> marginal(Side s) const;
  double total_mass() const;
  bool nonnegative() const;
  // inverse CDF on the flattened (ask-major) weights with a single uniform
  std::pair<std::size_t, std::size_t> sample_index(double u) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> ask_, bid_, joint_;
};

enum class KernelFlavor { exact, hamiltonian };

class GibbsKernel {
 public:
  // laws indexed [n * (2Q+1) + q + Q]; throws if any law is not normalised
  GibbsKernel(TimeGrid grid, ActionGrid actions, KernelFlavor flavor, int q_max, std::vector<QuoteLaw> laws);

  const TimeGrid& grid() const { return grid_; }
  const ActionGrid& actions() const { return actions_; }
  KernelFlavor flavor() const { return flavor_; }
  int q_max() const { return q_max_; }
  const QuoteLaw& law(int n, int q) const;

 private:
  TimeGrid grid_;
  ActionGrid actions_;
  KernelFlavor flavor_;
  int q_max_;
  std::vector<QuoteLaw> laws_;
};

// Deterministic quotes per (interval, inventory).
class DeterministicPolicy {
 public:
  DeterministicPolicy(TimeGrid grid, int q_max, std::vector<Quote> quotes);
  const TimeGrid& grid() const { return grid_; }
  int q_max() const { return q_max_; }
  const Quote& quote(int n, int q) const;

 private:
  TimeGrid grid_;
  int q_max_;
  std::vector<Quote> quotes_;
};

using Policy = std::variant<DeterministicPolicy, GibbsKernel>;

const TimeGrid& policy_grid(const Policy& p);

std::vector<QuoteLaw> hamiltonian_gibbs(const ValueVector& v_next, double lambda, const ActionGrid& actions,
                                        const Model& m);
std::vector<QuoteLaw> exact_gibbs(const ValueVector& v_next, const ExactBellman& op);
std::vector<QuoteLaw> exact_gibbs(const ValueVector& v_next, double h, double lambda, const ActionGrid& actions,
                                  const Model& m);

// kernel on interval n built from v_hat at t_{n+1}
GibbsKernel hamiltonian_gibbs_kernel(const Trajectory& v_hat, double lambda, const ActionGrid& actions,
                                     const Model& m);
GibbsKernel exact_gibbs_kernel(const BellmanTable& table, const ExactBellman& op);

Quote mean_quote(const Policy& p, int n, int q);
Quote sample_quote(const Policy& p, int n, int q, double u);
FillMoments fill_moments(const Policy& p, int n, int q, const Model& m);
PolicyMoments policy_moments(const Policy& p, const Model& m);
Trajectory evaluate_policy(const Policy& p, const Model& m, double max_step = 1e-3);

DeterministicPolicy hard_feedback(const Trajectory& v0, const ActionGrid& actions, const Model& m);
DeterministicPolicy constant_spread(const Quote& quote, const Model& m);
// ask = clamp(c0 + c1 q), bid = clamp(c0 - c1 q)
DeterministicPolicy inventory_linear(double c0, double c1, const Model& m);

enum class PolicyKind { hard_feedback, exact_gibbs, hamiltonian_gibbs, constant_spread, inventory_linear };

struct PolicySpec {
  PolicyKind kind = PolicyKind::hard_feedback;
  std::string name;
  double h = 1e-3;        // Gibbs kernels: time step
  double lambda = 0.005;  // Gibbs kernels: temperature
  int nodes = 61;         // Gibbs kernels: nodes per coordinate
  double spread_a = 0.3, spread_b = 0.3;  // constant spread
  double c0 = 0.3, c1 = 0.04;             // inventory linear
};

Policy make_policy(const PolicySpec& spec, const Model& m, double reference_step = 1e-3);

// H^0_q(y) - int H_q(y, delta) pi_{n,q}(d delta)
double local_regret(const Policy& p, const ValueVector& y, int n, int q, const ActionGrid& actions, const Model& m);

struct ConcentrationMetrics {
  double sq_error_integral = 0.0;
  double regret_integral = 0.0;
};

// v0 must live on a grid the policy grid nests in
ConcentrationMetrics quote_concentration_metrics(const Policy& p, const Trajectory& v0, const ActionGrid& actions,
                                                 const Model& m);

class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct CurvatureCertificate {
  double d_a = 0.0, d_b = 0.0;
  double theta_a = 0.0, theta_b = 0.0;
  double mu_a = 0.0, mu_b = 0.0;
  bool holds = false;
};

CurvatureCertificate curvature_certificate(const Trajectory& v0, const Model& m);

void write_kernel_csv(std::ostream& os, const GibbsKernel& k);
void write_mean_quote_csv(std::ostream& os, const Policy& p);

}  // namespace rsmm
