#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace rsmm {

enum class Side { ask, bid };

struct ModelParams {
  double horizon = 1.0;
  int inventory_bound = 5;
  double sigma = 0.2;
  double gamma = 0.1;
  double phi = 0.02;
  double eta = 0.005;
  double quote_lo = 0.01;
  double quote_hi = 0.70;
  double alpha_a = 1.5;
  double alpha_b = 1.5;
  double k_a = 1.5;
  double k_b = 1.5;

  // throws std::invalid_argument naming the first bad field
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelParams& p);
// missing fields keep their baseline default
void from_json(const nlohmann::json& j, ModelParams& p);

// Value vector indexed by inventory q in {-Q..Q}, stored with offset Q.
class ValueVector {
 public:
  ValueVector() = default;
  explicit ValueVector(int q_max, double fill = 0.0);
  ValueVector(int q_max, std::vector<double> values);

  int q_max() const { return q_max_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](int q) { return values_[static_cast<std::size_t>(q + q_max_)]; }
  double operator[](int q) const { return values_[static_cast<std::size_t>(q + q_max_)]; }
  double& at(int q);
  double at(int q) const;

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  bool all_finite() const;
  double min() const;
  double max() const;
  double sup_distance(const ValueVector& other) const;

  ValueVector& operator+=(const ValueVector& o);
  ValueVector& operator-=(const ValueVector& o);
  ValueVector& operator*=(double s);
  ValueVector& add_scaled(double s, const ValueVector& o);
  ValueVector& add_constant(double c);

 private:
  int q_max_ = 0;
  std::vector<double> values_;
};

ValueVector operator+(ValueVector a, const ValueVector& b);
ValueVector operator-(ValueVector a, const ValueVector& b);
ValueVector operator*(double s, ValueVector a);

struct Quote {
  double ask = 0.0;
  double bid = 0.0;
  bool operator==(const Quote&) const = default;
};

struct ExponentialIntensity {
  double alpha = 1.0;
  double k = 1.0;
};

// Arrival intensity as a function of the quote offset. The exponential family is
// kept explicit so closed-form maximisation and the curvature certificate can use it.
class Intensity {
 public:
  static Intensity exponential(double alpha, double k);
  static Intensity generic(std::function<double(double)> rate,
                           std::function<double(double)> derivative = {});

  double operator()(double delta) const;
  bool has_derivative() const;
  double derivative(double delta) const;
  const std::optional<ExponentialIntensity>& as_exponential() const { return exp_; }

 private:
  std::optional<ExponentialIntensity> exp_;
  std::function<double(double)> rate_;
  std::function<double(double)> derivative_;
};

// Per-side policy moments E[Lambda(d)] and E[Lambda(d) exp(-gamma d)]; the averaged
// Hamiltonian of any quote law depends on the law only through these.
struct SideMoments {
  double rate = 0.0;
  double discounted_rate = 0.0;
};

struct FillMoments {
  SideMoments ask;
  SideMoments bid;
};

class Model {
 public:
  explicit Model(const ModelParams& p);
  Model(const ModelParams& p, Intensity ask, Intensity bid);

  const ModelParams& params() const { return p_; }
  int q_max() const { return p_.inventory_bound; }
  int dim() const { return 2 * p_.inventory_bound + 1; }
  double gamma() const { return p_.gamma; }

  const Intensity& intensity_fn(Side s) const { return s == Side::ask ? ask_ : bid_; }
  // throws std::domain_error outside [quote_lo, quote_hi]
  double intensity(Side s, double delta) const;
  // max of both intensities over the quote interval
  double max_intensity() const { return lambda_bar_; }

  bool active(Side s, int q) const;
  bool in_quote_range(double delta) const;
  void check_inventory(int q) const;
  void check_quote(const Quote& d) const;
  void check_vector(const ValueVector& y) const;

  ValueVector terminal() const;  // -Phi q^2
  double running_penalty(int q) const;  // -eta q^2 - gamma sigma^2 q^2 / 2

  // neighbor difference y_{q-1}-y_q (ask) or y_{q+1}-y_q (bid); 0 when inactive
  double neighbor_diff(Side s, int q, const ValueVector& y) const;
  // (Lambda(delta)/gamma)(1 - exp(-gamma(delta + d)))
  double fill_gain(Side s, double delta, double d) const;

 private:
  ModelParams p_;
  Intensity ask_;
  Intensity bid_;
  double lambda_bar_ = 0.0;
};

double intensity(Side side, double delta, const Model& m);
std::pair<double, double> jump_increments(int q, const ValueVector& y, const Quote& delta, const Model& m);
double hamiltonian(int q, const ValueVector& y, const Quote& delta, const Model& m);
double averaged_hamiltonian(int q, const ValueVector& y, const FillMoments& mom, const Model& m);
FillMoments point_moments(int q, const Quote& delta, const Model& m);
double active_sq_distance(int q, const Quote& delta, const Quote& ref, const Model& m);

}  // namespace rsmm
