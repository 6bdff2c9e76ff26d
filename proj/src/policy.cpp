#include "rsmm/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rsmm/csv.hpp"

namespace rsmm {

namespace {

constexpr double kNormTol = 1e-12;

std::size_t inverse_cdf(const std::vector<double>& w, double u) {
  double c = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    c += w[i];
    if (u < c) return i;
  }
  return last;
}

std::size_t slot(int n, int q, int q_max) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * q_max + 1) + static_cast<std::size_t>(q + q_max);
}

}  // namespace

// ---- QuoteLaw

QuoteLaw QuoteLaw::product(std::vector<double> ask, std::vector<double> bid) {
  if (ask.size() != bid.size() || ask.empty()) throw std::invalid_argument("QuoteLaw: marginal sizes differ");
  QuoteLaw l;
  l.n_ = ask.size();
  l.ask_ = std::move(ask);
  l.bid_ = std::move(bid);
  return l;
}

QuoteLaw QuoteLaw::joint(std::size_t n, std::vector<double> w) {
  if (n == 0 || w.size() != n * n) throw std::invalid_argument("QuoteLaw: joint table must be n*n");
  QuoteLaw l;
  l.n_ = n;
  l.joint_ = std::move(w);
  return l;
}

double QuoteLaw::weight(std::size_t i, std::size_t j) const {
  return is_product() ? ask_[i] * bid_[j] : joint_[i * n_ + j];
}

std::vector<double> QuoteLaw::marginal(Side s) const {
  if (is_product()) return s == Side::ask ? ask_ : bid_;
  std::vector<double> m(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m[s == Side::ask ? i : j] += joint_[i * n_ + j];
  return m;
}

double QuoteLaw::total_mass() const {
  if (is_product())
    return std::accumulate(ask_.begin(), ask_.end(), 0.0) * std::accumulate(bid_.begin(), bid_.end(), 0.0);
  return std::accumulate(joint_.begin(), joint_.end(), 0.0);
}

bool QuoteLaw::nonnegative() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
  };
  return ok(ask_) && ok(bid_) && ok(joint_);
}

std::pair<std::size_t, std::size_t> QuoteLaw::sample_index(double u) const {
  if (is_product()) {
    std::size_t i = inverse_cdf(ask_, u);
    double before = 0.0;
    for (std::size_t k = 0; k < i; ++k) before += ask_[k];
    double r = std::clamp((u - before) / ask_[i], 0.0, 1.0);
    return {i, inverse_cdf(bid_, r)};
  }
  std::size_t k = inverse_cdf(joint_, u);
  return {k / n_, k % n_};
}

// ---- kernels and policies

GibbsKernel::GibbsKernel(TimeGrid grid, ActionGrid actions, KernelFlavor flavor, int q_max,
                         std::vector<QuoteLaw> laws)
    : grid_(grid), actions_(std::move(actions)), flavor_(flavor), q_max_(q_max), laws_(std::move(laws)) {
  if (laws_.size() != static_cast<std::size_t>(grid_.steps()) * (2 * q_max_ + 1))
    throw std::invalid_argument("GibbsKernel: expected one law per (interval, inventory)");
  for (std::size_t k = 0; k < laws_.size(); ++k) {
    const auto& l = laws_[k];
    if (l.size() != actions_.size()) throw std::invalid_argument("GibbsKernel: law size differs from action grid");
    if (!l.nonnegative() || std::abs(l.total_mass() - 1.0) > kNormTol)
      throw std::invalid_argument("GibbsKernel: weights not normalized at slot " + std::to_string(k));
  }
}

const QuoteLaw& GibbsKernel::law(int n, int q) const {
  if (n < 0 || n >= grid_.steps() || q < -q_max_ || q > q_max_)
    throw std::out_of_range("GibbsKernel: no law at (n=" + std::to_string(n) + ", q=" + std::to_string(q) + ")");
  return laws_[slot(n, q, q_max_)];
}

DeterministicPolicy::DeterministicPolicy(TimeGrid grid, int q_max, std::vector<Quote> quotes)
    : grid_(grid), q_max_(q_max), quotes_(std::move(quotes)) {
  if (quotes_.size() != static_cast<std::size_t>(grid_.steps()) * (2 * q_max_ + 1))
    throw std::invalid_argument("DeterministicPolicy: expected one quote per (interval, inventory)");
}

const Quote& DeterministicPolicy::quote(int n, int q) const {
  if (n < 0 || n >= grid_.steps() || q < -q_max_ || q > q_max_)
    throw std::out_of_range("DeterministicPolicy: no quote at (n=" + std::to_string(n) + ", q=" + std::to_string(q) +
                            ")");
  return quotes_[slot(n, q, q_max_)];
}

const TimeGrid& policy_grid(const Policy& p) {
  return std::visit([](const auto& x) -> const TimeGrid& { return x.grid(); }, p);
}

std::vector<QuoteLaw> hamiltonian_gibbs(const ValueVector& v_next, double lambda, const ActionGrid& actions,
                                        const Model& m) {
  if (!(lambda > 0.0)) throw std::domain_error("hamiltonian_gibbs: lambda must be > 0");
  m.check_vector(v_next);
  std::vector<QuoteLaw> out;
  std::vector<double> s(actions.size());
  for (int q = -m.q_max(); q <= m.q_max(); ++q) {
    std::vector<double> marg[2];
    for (Side side : {Side::ask, Side::bid}) {
      auto& w = marg[side == Side::ask ? 0 : 1];
      if (!m.active(side, q)) {
        w = actions.probs();
        continue;
      }
      double d = m.neighbor_diff(side, q, v_next);
      for (std::size_t i = 0; i < actions.size(); ++i) s[i] = m.fill_gain(side, actions.node(i), d);
      w = gibbs_weights(s, actions.probs(), lambda);
    }
    out.push_back(QuoteLaw::product(std::move(marg[0]), std::move(marg[1])));
  }
  return out;
}

std::vector<QuoteLaw> exact_gibbs(const ValueVector& v_next, const ExactBellman& op) {
  const auto& acts = op.actions();
  const std::size_t n = acts.size();
  const int qm = v_next.q_max();
  auto sc = op.scores(v_next);
  std::vector<double> p(n * n), s(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = acts.weight(i, j);
  std::vector<QuoteLaw> out;
  for (int q = -qm; q <= qm; ++q) {
    // scores minus v_next,q: the constant cancels, subtracting it keeps the exponent small
    for (std::size_t k = 0; k < n * n; ++k) s[k] = sc[k][static_cast<std::size_t>(q + qm)] - v_next[q];
    out.push_back(QuoteLaw::joint(n, gibbs_weights(s, p, op.step() * op.lambda())));
  }
  return out;
}

std::vector<QuoteLaw> exact_gibbs(const ValueVector& v_next, double h, double lambda, const ActionGrid& actions,
                                  const Model& m) {
  return exact_gibbs(v_next, ExactBellman(m, actions, h, lambda));
}

GibbsKernel hamiltonian_gibbs_kernel(const Trajectory& v_hat, double lambda, const ActionGrid& actions,
                                     const Model& m) {
  std::vector<QuoteLaw> laws;
  for (int n = 0; n < v_hat.grid.steps(); ++n) {
    auto per_q = hamiltonian_gibbs(v_hat.at(n + 1), lambda, actions, m);
    std::move(per_q.begin(), per_q.end(), std::back_inserter(laws));
  }
  return GibbsKernel(v_hat.grid, actions, KernelFlavor::hamiltonian, m.q_max(), std::move(laws));
}

GibbsKernel exact_gibbs_kernel(const BellmanTable& table, const ExactBellman& op) {
  std::vector<QuoteLaw> laws;
  for (int n = 0; n < table.grid.steps(); ++n) {
    auto per_q = exact_gibbs(table.at(n + 1), op);
    std::move(per_q.begin(), per_q.end(), std::back_inserter(laws));
  }
  return GibbsKernel(table.grid, op.actions(), KernelFlavor::exact, op.model().q_max(), std::move(laws));
}

Quote mean_quote(const Policy& p, int n, int q) {
  if (auto d = std::get_if<DeterministicPolicy>(&p)) return d->quote(n, q);
  const auto& k = std::get<GibbsKernel>(p);
  const auto& law = k.law(n, q);
  Quote r{0.0, 0.0};
  auto ma = law.marginal(Side::ask), mb = law.marginal(Side::bid);
  for (std::size_t i = 0; i < law.size(); ++i) {
    r.ask += ma[i] * k.actions().node(i);
    r.bid += mb[i] * k.actions().node(i);
  }
  return r;
}

Quote sample_quote(const Policy& p, int n, int q, double u) {
  if (auto d = std::get_if<DeterministicPolicy>(&p)) return d->quote(n, q);
  const auto& k = std::get<GibbsKernel>(p);
  auto [i, j] = k.law(n, q).sample_index(u);
  return {k.actions().node(i), k.actions().node(j)};
}

FillMoments fill_moments(const Policy& p, int n, int q, const Model& m) {
  if (auto d = std::get_if<DeterministicPolicy>(&p)) return point_moments(q, d->quote(n, q), m);
  const auto& k = std::get<GibbsKernel>(p);
  const auto& law = k.law(n, q);
  const double g = m.gamma();
  FillMoments f;
  for (Side side : {Side::ask, Side::bid}) {
    auto w = law.marginal(side);
    SideMoments& s = side == Side::ask ? f.ask : f.bid;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double x = k.actions().node(i);
      double lam = m.intensity(side, x);
      s.rate += w[i] * lam;
      s.discounted_rate += w[i] * lam * std::exp(-g * x);
    }
  }
  return f;
}

PolicyMoments policy_moments(const Policy& p, const Model& m) {
  const TimeGrid& g = policy_grid(p);
  PolicyMoments pm(g, m.q_max());
  for (int n = 0; n < g.steps(); ++n)
    for (int q = -m.q_max(); q <= m.q_max(); ++q) pm.at(n, q) = fill_moments(p, n, q, m);
  return pm;
}

Trajectory evaluate_policy(const Policy& p, const Model& m, double max_step) {
  return policy_evaluation_ode(policy_moments(p, m), m, max_step);
}

DeterministicPolicy hard_feedback(const Trajectory& v0, const ActionGrid& actions, const Model& m) {
  std::vector<Quote> qs;
  for (int n = 0; n < v0.grid.steps(); ++n)
    for (int q = -m.q_max(); q <= m.q_max(); ++q) qs.push_back(hard_hamiltonian(q, v0.at(n), actions, m).argmax);
  return DeterministicPolicy(v0.grid, m.q_max(), std::move(qs));
}

DeterministicPolicy constant_spread(const Quote& quote, const Model& m) {
  m.check_quote(quote);
  return DeterministicPolicy(TimeGrid(m.params().horizon, 1), m.q_max(),
                             std::vector<Quote>(static_cast<std::size_t>(m.dim()), quote));
}

DeterministicPolicy inventory_linear(double c0, double c1, const Model& m) {
  const auto& p = m.params();
  std::vector<Quote> qs;
  for (int q = -m.q_max(); q <= m.q_max(); ++q)
    qs.push_back({std::clamp(c0 + c1 * q, p.quote_lo, p.quote_hi), std::clamp(c0 - c1 * q, p.quote_lo, p.quote_hi)});
  return DeterministicPolicy(TimeGrid(p.horizon, 1), m.q_max(), std::move(qs));
}

Policy make_policy(const PolicySpec& spec, const Model& m, double reference_step) {
  const double T = m.params().horizon;
  switch (spec.kind) {
    case PolicyKind::hard_feedback: {
      ActionGrid acts(static_cast<std::size_t>(spec.nodes), m.params());
      TimeGrid g(T, std::max(1, static_cast<int>(std::ceil(T / reference_step - 1e-9))));
      return hard_feedback(solve_hard(g, acts, m), acts, m);
    }
    case PolicyKind::hamiltonian_gibbs: {
      ActionGrid acts(static_cast<std::size_t>(spec.nodes), m.params());
      TimeGrid g = TimeGrid::from_step(T, spec.h);
      return hamiltonian_gibbs_kernel(euler_soft_scheme(spec.lambda, g, acts, m), spec.lambda, acts, m);
    }
    case PolicyKind::exact_gibbs: {
      ExactBellman op(m, ActionGrid(static_cast<std::size_t>(spec.nodes), m.params()), spec.h, spec.lambda);
      return exact_gibbs_kernel(bellman_recursion(op, m), op);
    }
    case PolicyKind::constant_spread:
      return constant_spread({spec.spread_a, spec.spread_b}, m);
    case PolicyKind::inventory_linear:
      return inventory_linear(spec.c0, spec.c1, m);
  }
  throw std::invalid_argument("make_policy: unknown policy kind");
}

double local_regret(const Policy& p, const ValueVector& y, int n, int q, const ActionGrid& actions, const Model& m) {
  double h0 = hard_hamiltonian(q, y, actions, m).value;
  return h0 - averaged_hamiltonian(q, y, fill_moments(p, n, q, m), m);
}

ConcentrationMetrics quote_concentration_metrics(const Policy& p, const Trajectory& v0, const ActionGrid& actions,
                                                 const Model& m) {
  const TimeGrid& g = policy_grid(p);
  Trajectory v = v0.restrict_to(g);
  std::vector<double> sq(static_cast<std::size_t>(g.steps()), 0.0), reg(sq.size(), 0.0);
  for (int n = 0; n < g.steps(); ++n) {
    for (int q = -m.q_max(); q <= m.q_max(); ++q) {
      auto hm = hard_hamiltonian(q, v.at(n), actions, m);
      sq[n] += active_sq_distance(q, mean_quote(p, n, q), hm.argmax, m);
      reg[n] += hm.value - averaged_hamiltonian(q, v.at(n), fill_moments(p, n, q, m), m);
    }
  }
  return {left_riemann(sq, g.step()), left_riemann(reg, g.step())};
}

CurvatureCertificate curvature_certificate(const Trajectory& v0, const Model& m) {
  auto ea = m.intensity_fn(Side::ask).as_exponential();
  auto eb = m.intensity_fn(Side::bid).as_exponential();
  if (!ea || !eb) throw unsupported_error("curvature_certificate: requires exponential intensities");
  const auto& p = m.params();
  const int Q = m.q_max();
  double da = -INFINITY, db = -INFINITY;
  for (const auto& v : v0.values) {
    for (int q = -Q + 1; q <= Q; ++q) da = std::max(da, v[q - 1] - v[q]);
    for (int q = -Q; q < Q; ++q) db = std::max(db, v[q + 1] - v[q]);
  }
  CurvatureCertificate c;
  const double g = p.gamma;
  c.d_a = p.quote_hi + da;
  c.d_b = p.quote_hi + db;
  c.theta_a = 2.0 / g * std::log1p(g / ea->k);
  c.theta_b = 2.0 / g * std::log1p(g / eb->k);
  auto mu = [&](const ExponentialIntensity& e, double d) {
    return e.alpha / g * std::exp(-e.k * p.quote_hi) * ((e.k + g) * (e.k + g) * std::exp(-g * d) - e.k * e.k);
  };
  c.mu_a = mu(*ea, c.d_a);
  c.mu_b = mu(*eb, c.d_b);
  c.holds = c.d_a < c.theta_a && c.d_b < c.theta_b;
  return c;
}

void write_kernel_csv(std::ostream& os, const GibbsKernel& k) {
  CsvWriter w(os, {"n", "q", "node_i", "node_j", "weight"});
  for (int n = 0; n < k.grid().steps(); ++n)
    for (int q = -k.q_max(); q <= k.q_max(); ++q) {
      const auto& law = k.law(n, q);
      for (std::size_t i = 0; i < law.size(); ++i)
        for (std::size_t j = 0; j < law.size(); ++j)
          w.row({static_cast<double>(n), static_cast<double>(q), static_cast<double>(i), static_cast<double>(j),
                 law.weight(i, j)});
    }
}

void write_mean_quote_csv(std::ostream& os, const Policy& p) {
  const TimeGrid& g = policy_grid(p);
  int qm = std::visit([](const auto& x) { return x.q_max(); }, p);
  CsvWriter w(os, {"n", "t", "q", "mean_a", "mean_b"});
  for (int n = 0; n < g.steps(); ++n)
    for (int q = -qm; q <= qm; ++q) {
      Quote mq = mean_quote(p, n, q);
      w.row({static_cast<double>(n), g.time(n), static_cast<double>(q), mq.ask, mq.bid});
    }
}

}  // namespace rsmm
