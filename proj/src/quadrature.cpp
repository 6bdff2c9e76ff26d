#include "rsmm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rsmm {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 2; k <= n; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
    p0 = p1;
    p1 = pk;
  }
  double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  return x;
}

}  // namespace

Quadrature1D gauss_legendre(std::size_t n, double lo, double hi) {
  if (n == 0) throw std::domain_error("gauss_legendre: node count must be >= 1");
  if (!(lo < hi)) throw std::domain_error("gauss_legendre: empty interval");
  std::vector<double> x(n), w(n);
  std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(n, z);
      dp = d;
      double dz = p / d;
      z -= dz;
      if (std::abs(dz) <= 1e-15) break;
    }
    dp = legendre(n, z).second;
    // roots come out decreasing; store ascending and mirror
    x[n - 1 - i] = z;
    x[i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  Quadrature1D r;
  r.lo = lo;
  r.hi = hi;
  double c = 0.5 * (hi + lo), s = 0.5 * (hi - lo);
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes[i] = c + s * x[i];
    r.weights[i] = s * w[i];
  }
  return r;
}

ActionGrid::ActionGrid(std::size_t n, double lo, double hi) : lo_(lo), hi_(hi) {
  auto q = gauss_legendre(n, lo, hi);
  nodes_ = q.nodes;
  prob_.resize(n);
  for (std::size_t i = 0; i < n; ++i) prob_[i] = q.weights[i] / (hi - lo);
}

double expectation_under_nu(const std::function<double(const Quote&)>& f, const ActionGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double v = f({grid.node(i), grid.node(j)});
      if (!std::isfinite(v))
        throw std::runtime_error("expectation_under_nu: non-finite value at node (" + std::to_string(i) +
                                 ", " + std::to_string(j) + ") = (" + std::to_string(grid.node(i)) +
                                 ", " + std::to_string(grid.node(j)) + ")");
      s += grid.weight(i, j) * v;
    }
  return s;
}

double weighted_lse(const std::vector<double>& s, const std::vector<double>& p, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("weighted_lse: lambda must be > 0");
  double m = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += p[i] * std::exp((s[i] - m) / lambda);
  return m + lambda * std::log(acc);
}

double soft_hamiltonian(int q, const ValueVector& y, double lambda, const ActionGrid& grid, const Model& m) {
  if (!(lambda > 0.0)) throw std::domain_error("soft_hamiltonian: lambda must be > 0");
  m.check_inventory(q);
  m.check_vector(y);
  // the grid weights are a product and H is separable, so the 2D log-sum-exp
  // splits into one 1D log-sum-exp per active side
  double h = m.running_penalty(q);
  std::vector<double> s(grid.size());
  for (Side side : {Side::ask, Side::bid}) {
    if (!m.active(side, q)) continue;
    double d = m.neighbor_diff(side, q, y);
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = m.fill_gain(side, grid.node(i), d);
    h += weighted_lse(s, grid.probs(), lambda);
  }
  return h;
}

double side_argmax(Side side, double d, const ActionGrid& grid, const Model& m) {
  const auto& p = m.params();
  const auto& f = m.intensity_fn(side);
  if (auto e = f.as_exponential()) {
    double x = std::log1p(p.gamma / e->k) / p.gamma - d;
    return std::clamp(x, p.quote_lo, p.quote_hi);
  }
  auto gain = [&](double x) { return m.fill_gain(side, x, d); };
  std::size_t best = 0;
  double bv = gain(grid.node(0));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double v = gain(grid.node(i));
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  double a = best == 0 ? p.quote_lo : grid.node(best - 1);
  double b = best + 1 == grid.size() ? p.quote_hi : grid.node(best + 1);
  double x = golden_max(gain, a, b, 1e-10);
  // golden section stalls near sqrt(eps) on the flat top; polish the stationary
  // point by bisection on the slope sign
  auto slope = [&](double t) {
    if (f.has_derivative()) {
      double e = std::exp(-p.gamma * (t + d));
      return f.derivative(t) * (1.0 - e) / p.gamma + f(t) * e;
    }
    const double step = 1e-5;
    double lo = std::max(p.quote_lo, t - step), hi = std::min(p.quote_hi, t + step);
    return (gain(hi) - gain(lo)) / (hi - lo);
  };
  double lo = std::max(a, x - 1e-6), hi = std::min(b, x + 1e-6);
  if (lo < hi && slope(lo) > 0.0 && slope(hi) < 0.0) {
    for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
      double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
  }
  double cands[] = {x, a, b, grid.node(best)};
  double arg = x, val = gain(x);
  for (double c : cands) {
    double v = gain(c);
    if (v > val) {
      val = v;
      arg = c;
    }
  }
  return arg;
}

HardMax hard_hamiltonian(int q, const ValueVector& y, const ActionGrid& grid, const Model& m) {
  m.check_inventory(q);
  m.check_vector(y);
  const auto& p = m.params();
  HardMax r;
  r.value = m.running_penalty(q);
  r.argmax = {p.quote_lo, p.quote_lo};
  for (Side side : {Side::ask, Side::bid}) {
    if (!m.active(side, q)) continue;
    double d = m.neighbor_diff(side, q, y);
    double x = side_argmax(side, d, grid, m);
    r.value += m.fill_gain(side, x, d);
    (side == Side::ask ? r.argmax.ask : r.argmax.bid) = x;
  }
  return r;
}

ValueVector soft_field(const ValueVector& y, double lambda, const ActionGrid& grid, const Model& m) {
  ValueVector out(m.q_max());
  for (int q = -m.q_max(); q <= m.q_max(); ++q) out[q] = soft_hamiltonian(q, y, lambda, grid, m);
  return out;
}

ValueVector hard_field(const ValueVector& y, const ActionGrid& grid, const Model& m) {
  ValueVector out(m.q_max());
  for (int q = -m.q_max(); q <= m.q_max(); ++q) out[q] = hard_hamiltonian(q, y, grid, m).value;
  return out;
}

}  // namespace rsmm
