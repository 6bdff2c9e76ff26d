#include "rsmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsmm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ModelParams: " + what);
}

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }
bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void ModelParams::validate() const {
  require(finite_pos(horizon), "horizon must be > 0");
  require(inventory_bound >= 1, "inventory_bound must be >= 1");
  require(finite_pos(sigma), "sigma must be > 0");
  require(finite_pos(gamma), "gamma must be > 0");
  require(finite_nonneg(phi), "phi must be >= 0");
  require(finite_nonneg(eta), "eta must be >= 0");
  require(std::isfinite(quote_lo) && std::isfinite(quote_hi) && quote_lo < quote_hi,
          "quote_lo must be < quote_hi");
  require(finite_pos(alpha_a) && finite_pos(alpha_b), "alpha_a, alpha_b must be > 0");
  require(finite_pos(k_a) && finite_pos(k_b), "k_a, k_b must be > 0");
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"horizon", p.horizon},   {"inventory_bound", p.inventory_bound},
                     {"sigma", p.sigma},       {"gamma", p.gamma},
                     {"phi", p.phi},           {"eta", p.eta},
                     {"quote_lo", p.quote_lo}, {"quote_hi", p.quote_hi},
                     {"alpha_a", p.alpha_a},   {"alpha_b", p.alpha_b},
                     {"k_a", p.k_a},           {"k_b", p.k_b}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  static const char* known[] = {"horizon",  "inventory_bound", "sigma",   "gamma",
                                "phi",      "eta",             "quote_lo", "quote_hi",
                                "alpha_a",  "alpha_b",         "k_a",     "k_b"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw std::invalid_argument("ModelParams: unknown field '" + it.key() + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("horizon", p.horizon);
  get("inventory_bound", p.inventory_bound);
  get("sigma", p.sigma);
  get("gamma", p.gamma);
  get("phi", p.phi);
  get("eta", p.eta);
  get("quote_lo", p.quote_lo);
  get("quote_hi", p.quote_hi);
  get("alpha_a", p.alpha_a);
  get("alpha_b", p.alpha_b);
  get("k_a", p.k_a);
  get("k_b", p.k_b);
  p.validate();
}

// ---- ValueVector

ValueVector::ValueVector(int q_max, double fill) : q_max_(q_max) {
  if (q_max < 1) throw std::invalid_argument("ValueVector: inventory bound must be >= 1");
  values_.assign(static_cast<std::size_t>(2 * q_max + 1), fill);
  if (!std::isfinite(fill)) throw std::invalid_argument("ValueVector: non-finite entry");
}

ValueVector::ValueVector(int q_max, std::vector<double> values)
    : q_max_(q_max), values_(std::move(values)) {
  if (q_max < 1) throw std::invalid_argument("ValueVector: inventory bound must be >= 1");
  if (values_.size() != static_cast<std::size_t>(2 * q_max + 1))
    throw std::invalid_argument("ValueVector: expected " + std::to_string(2 * q_max + 1) +
                                " entries, got " + std::to_string(values_.size()));
  if (!all_finite()) throw std::invalid_argument("ValueVector: non-finite entry");
}

double& ValueVector::at(int q) {
  if (q < -q_max_ || q > q_max_) throw std::out_of_range("ValueVector: inventory " + std::to_string(q));
  return (*this)[q];
}

double ValueVector::at(int q) const {
  if (q < -q_max_ || q > q_max_) throw std::out_of_range("ValueVector: inventory " + std::to_string(q));
  return (*this)[q];
}

bool ValueVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double ValueVector::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ValueVector::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ValueVector::sup_distance(const ValueVector& o) const {
  if (o.size() != size()) throw std::invalid_argument("ValueVector: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i) d = std::max(d, std::abs(values_[i] - o.values_[i]));
  return d;
}

ValueVector& ValueVector::operator+=(const ValueVector& o) { return add_scaled(1.0, o); }
ValueVector& ValueVector::operator-=(const ValueVector& o) { return add_scaled(-1.0, o); }

ValueVector& ValueVector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ValueVector& ValueVector::add_scaled(double s, const ValueVector& o) {
  if (o.size() != size()) throw std::invalid_argument("ValueVector: dimension mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

ValueVector& ValueVector::add_constant(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ValueVector operator+(ValueVector a, const ValueVector& b) { return a += b; }
ValueVector operator-(ValueVector a, const ValueVector& b) { return a -= b; }
ValueVector operator*(double s, ValueVector a) { return a *= s; }

// ---- Intensity

Intensity Intensity::exponential(double alpha, double k) {
  Intensity f;
  f.exp_ = ExponentialIntensity{alpha, k};
  f.rate_ = [alpha, k](double d) { return alpha * std::exp(-k * d); };
  f.derivative_ = [alpha, k](double d) { return -k * alpha * std::exp(-k * d); };
  return f;
}

Intensity Intensity::generic(std::function<double(double)> rate, std::function<double(double)> derivative) {
  if (!rate) throw std::invalid_argument("Intensity: empty rate function");
  Intensity f;
  f.rate_ = std::move(rate);
  f.derivative_ = std::move(derivative);
  return f;
}

double Intensity::operator()(double delta) const { return rate_(delta); }
bool Intensity::has_derivative() const { return static_cast<bool>(derivative_); }

double Intensity::derivative(double delta) const {
  if (!derivative_) throw std::logic_error("Intensity: derivative not available");
  return derivative_(delta);
}

// ---- Model

Model::Model(const ModelParams& p)
    : Model(p, Intensity::exponential(p.alpha_a, p.k_a), Intensity::exponential(p.alpha_b, p.k_b)) {}

Model::Model(const ModelParams& p, Intensity ask, Intensity bid)
    : p_(p), ask_(std::move(ask)), bid_(std::move(bid)) {
  p_.validate();
  auto side_max = [&](const Intensity& f) {
    if (auto e = f.as_exponential()) return e->alpha * std::exp(-e->k * p_.quote_lo);
    // generic: grid max, 2001 points
    double m = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
      double d = p_.quote_lo + (p_.quote_hi - p_.quote_lo) * i / n;
      double v = f(d);
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("Model: intensity must be finite and >= 0 on the quote range");
      m = std::max(m, v);
    }
    return m;
  };
  lambda_bar_ = std::max(side_max(ask_), side_max(bid_));
}

bool Model::in_quote_range(double delta) const {
  return delta >= p_.quote_lo && delta <= p_.quote_hi;
}

double Model::intensity(Side s, double delta) const {
  if (!in_quote_range(delta))
    throw std::domain_error("intensity: delta " + std::to_string(delta) + " outside quote range");
  return intensity_fn(s)(delta);
}

bool Model::active(Side s, int q) const {
  return s == Side::ask ? q > -p_.inventory_bound : q < p_.inventory_bound;
}

void Model::check_inventory(int q) const {
  if (q < -p_.inventory_bound || q > p_.inventory_bound)
    throw std::out_of_range("inventory " + std::to_string(q) + " outside [-Q, Q]");
}

void Model::check_quote(const Quote& d) const {
  if (!in_quote_range(d.ask) || !in_quote_range(d.bid))
    throw std::domain_error("quote (" + std::to_string(d.ask) + ", " + std::to_string(d.bid) +
                            ") outside the quote rectangle");
}

void Model::check_vector(const ValueVector& y) const {
  if (y.q_max() != p_.inventory_bound)
    throw std::invalid_argument("value vector has inventory bound " + std::to_string(y.q_max()) +
                                ", model has " + std::to_string(p_.inventory_bound));
}

ValueVector Model::terminal() const {
  ValueVector v(q_max());
  for (int q = -q_max(); q <= q_max(); ++q) v[q] = -p_.phi * q * q;
  return v;
}

double Model::running_penalty(int q) const {
  double q2 = static_cast<double>(q) * q;
  return -p_.eta * q2 - 0.5 * p_.gamma * p_.sigma * p_.sigma * q2;
}

double Model::neighbor_diff(Side s, int q, const ValueVector& y) const {
  if (!active(s, q)) return 0.0;
  return s == Side::ask ? y[q - 1] - y[q] : y[q + 1] - y[q];
}

double Model::fill_gain(Side s, double delta, double d) const {
  double g = p_.gamma;
  return intensity_fn(s)(delta) / g * -std::expm1(-g * (delta + d));
}

// ---- free operations

double intensity(Side side, double delta, const Model& m) { return m.intensity(side, delta); }

std::pair<double, double> jump_increments(int q, const ValueVector& y, const Quote& delta, const Model& m) {
  m.check_inventory(q);
  m.check_vector(y);
  double da = m.active(Side::ask, q) ? delta.ask + y[q - 1] - y[q] : 0.0;
  double db = m.active(Side::bid, q) ? delta.bid + y[q + 1] - y[q] : 0.0;
  return {da, db};
}

double hamiltonian(int q, const ValueVector& y, const Quote& delta, const Model& m) {
  m.check_inventory(q);
  m.check_vector(y);
  m.check_quote(delta);
  double h = m.running_penalty(q);
  if (m.active(Side::ask, q)) h += m.fill_gain(Side::ask, delta.ask, m.neighbor_diff(Side::ask, q, y));
  if (m.active(Side::bid, q)) h += m.fill_gain(Side::bid, delta.bid, m.neighbor_diff(Side::bid, q, y));
  return h;
}

double averaged_hamiltonian(int q, const ValueVector& y, const FillMoments& mom, const Model& m) {
  m.check_inventory(q);
  double g = m.gamma();
  double h = m.running_penalty(q);
  if (m.active(Side::ask, q)) {
    double d = m.neighbor_diff(Side::ask, q, y);
    h += (mom.ask.rate - std::exp(-g * d) * mom.ask.discounted_rate) / g;
  }
  if (m.active(Side::bid, q)) {
    double d = m.neighbor_diff(Side::bid, q, y);
    h += (mom.bid.rate - std::exp(-g * d) * mom.bid.discounted_rate) / g;
  }
  return h;
}

FillMoments point_moments(int q, const Quote& delta, const Model& m) {
  m.check_inventory(q);
  double g = m.gamma();
  FillMoments f;
  double la = m.intensity(Side::ask, delta.ask);
  double lb = m.intensity(Side::bid, delta.bid);
  f.ask = {la, la * std::exp(-g * delta.ask)};
  f.bid = {lb, lb * std::exp(-g * delta.bid)};
  return f;
}

double active_sq_distance(int q, const Quote& delta, const Quote& ref, const Model& m) {
  m.check_inventory(q);
  double s = 0.0;
  if (m.active(Side::ask, q)) s += (delta.ask - ref.ask) * (delta.ask - ref.ask);
  if (m.active(Side::bid, q)) s += (delta.bid - ref.bid) * (delta.bid - ref.bid);
  return s;
}

}  // namespace rsmm
