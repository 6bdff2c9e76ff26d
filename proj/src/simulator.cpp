#include "rsmm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rsmm/csv.hpp"
#include "rsmm/parallel.hpp"
#include "rsmm/rng.hpp"

namespace rsmm {

void SimConfig::validate(const Model& m) const {
  if (paths < 1) throw std::invalid_argument("SimConfig: path count must be >= 1");
  if (!(substep > 0.0)) throw std::invalid_argument("SimConfig: substep must be > 0");
  m.check_inventory(inventory0);
}

namespace {

std::vector<double> proposal_times(const CounterRng& rng, double rate, double T) {
  std::vector<double> t;
  if (rate <= 0.0) return t;
  double s = 0.0;
  for (std::uint64_t k = 0;; ++k) {
    s += -std::log(rng.uniform(k)) / rate;
    if (s > T) break;
    t.push_back(s);
  }
  return t;
}

std::vector<double> uniforms(const CounterRng& rng, std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = rng.uniform(k);
  return u;
}

}  // namespace

PathScenario make_scenario(const SimConfig& cfg, std::uint64_t path, const Model& m) {
  const auto& p = m.params();
  const double T = p.horizon;
  auto stream = [&](RngStream s) { return CounterRng(cfg.seed, path, static_cast<std::uint64_t>(s)); };
  PathScenario sc;
  const double rate = m.max_intensity();
  sc.ask_times = proposal_times(stream(RngStream::ask_times), rate, T);
  sc.bid_times = proposal_times(stream(RngStream::bid_times), rate, T);
  sc.ask_mark = uniforms(stream(RngStream::ask_mark), sc.ask_times.size());
  sc.ask_accept = uniforms(stream(RngStream::ask_accept), sc.ask_times.size());
  sc.bid_mark = uniforms(stream(RngStream::bid_mark), sc.bid_times.size());
  sc.bid_accept = uniforms(stream(RngStream::bid_accept), sc.bid_times.size());

  struct Point {
    double t;
    int event;
  };
  std::vector<Point> pts;
  const int M = std::max(1, static_cast<int>(std::ceil(T / cfg.substep - 1e-9)));
  for (int k = 0; k <= M; ++k) pts.push_back({k == M ? T : k * (T / M), -1});
  for (std::size_t k = 0; k < sc.ask_times.size(); ++k) pts.push_back({sc.ask_times[k], static_cast<int>(2 * k)});
  for (std::size_t k = 0; k < sc.bid_times.size(); ++k) pts.push_back({sc.bid_times[k], static_cast<int>(2 * k + 1)});
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });

  auto bm = stream(RngStream::brownian);
  sc.times.reserve(pts.size());
  sc.mid.reserve(pts.size());
  sc.event.reserve(pts.size());
  double s = cfg.mid0, prev = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double dt = pts[k].t - prev;
    if (k > 0 && dt > 0.0) s += p.sigma * std::sqrt(dt) * bm.normal(k);
    sc.times.push_back(pts[k].t);
    sc.mid.push_back(s);
    sc.event.push_back(pts[k].event);
    prev = pts[k].t;
  }
  return sc;
}

PathOutcome simulate_path(const Policy& policy, const PathScenario& sc, const SimConfig& cfg, const Model& m) {
  const auto& p = m.params();
  const TimeGrid& grid = policy_grid(policy);
  if (std::abs(grid.horizon() - p.horizon) > 1e-12)
    throw std::invalid_argument("simulate_path: policy horizon differs from model horizon");
  const double rate = m.max_intensity();

  PathOutcome out;
  PathState& st = out.final_state;
  st.cash = cfg.cash0;
  st.mid = cfg.mid0;
  st.inventory = cfg.inventory0;
  out.min_inventory = out.max_inventory = st.inventory;
  double prev_t = 0.0, prev_s = cfg.mid0;
  for (std::size_t k = 0; k < sc.times.size(); ++k) {
    double t = sc.times[k], s = sc.mid[k];
    double q = st.inventory;
    double dt = t - prev_t;
    st.penalty += p.eta * q * q * dt;
    st.q2_integral += q * q * dt;
    out.inventory_gain += q * (s - prev_s);
    prev_t = t;
    prev_s = s;
    st.mid = s;

    int ev = sc.event[k];
    if (ev < 0) continue;
    Side side = ev % 2 == 0 ? Side::ask : Side::bid;
    std::size_t idx = static_cast<std::size_t>(ev / 2);
    if (!m.active(side, st.inventory)) continue;
    int n = grid.interval(t);
    double mark = side == Side::ask ? sc.ask_mark[idx] : sc.bid_mark[idx];
    double acc = side == Side::ask ? sc.ask_accept[idx] : sc.bid_accept[idx];
    Quote d = sample_quote(policy, n, st.inventory, mark);
    double delta = side == Side::ask ? d.ask : d.bid;
    if (!(acc < m.intensity(side, delta) / rate)) continue;
    if (side == Side::ask) {
      st.cash += s + delta;
      st.inventory -= 1;
      ++st.fills_ask;
    } else {
      st.cash -= s - delta;
      st.inventory += 1;
      ++st.fills_bid;
    }
    out.spread_income += delta;
    out.min_inventory = std::min(out.min_inventory, st.inventory);
    out.max_inventory = std::max(out.max_inventory, st.inventory);
  }
  double qT = st.inventory;
  out.pnl = st.cash + qT * st.mid;
  out.reward = out.pnl - p.phi * qT * qT - st.penalty;
  out.time_avg_q2 = st.q2_integral / p.horizon;
  return out;
}

PathOutcome simulate_path(const Policy& policy, const SimConfig& cfg, std::uint64_t path_index, const Model& m) {
  return simulate_path(policy, make_scenario(cfg, path_index, m), cfg, m);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

double mean_of(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()) / x.size(); }

double sd_of(const std::vector<double>& x, double mean) {
  if (x.size() < 2) return 0.0;
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - mean) * (x[i] - mean);
  return std::sqrt(pairwise_sum(d.data(), d.size()) / (x.size() - 1));
}

}  // namespace

double ce_from_samples(const std::vector<double>& r, double gamma) {
  if (r.empty()) throw std::domain_error("ce_from_samples: empty sample");
  if (!(gamma > 0.0)) throw std::domain_error("ce_from_samples: gamma must be > 0");
  double lo = *std::min_element(r.begin(), r.end());
  // exponents -gamma (r - lo) <= 0; expm1/log1p keep the small-gamma limit accurate
  std::vector<double> e(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) e[i] = std::expm1(-gamma * (r[i] - lo));
  double m = mean_of(e);
  return lo - std::log1p(m) / gamma;
}

double ce_standard_error(const std::vector<double>& r, double gamma) {
  if (r.size() < 2) return 0.0;
  double lo = *std::min_element(r.begin(), r.end());
  std::vector<double> y(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) y[i] = std::exp(-gamma * (r[i] - lo));
  double m = mean_of(y);
  return sd_of(y, m) / (gamma * m * std::sqrt(static_cast<double>(r.size())));
}

MonteCarloResult run_monte_carlo(const std::vector<Strategy>& strategies, const SimConfig& cfg, const Model& m) {
  if (strategies.empty()) throw std::invalid_argument("run_monte_carlo: need at least one strategy");
  cfg.validate(m);
  const std::size_t S = strategies.size(), P = static_cast<std::size_t>(cfg.paths);
  std::vector<std::vector<PathOutcome>> res(S, std::vector<PathOutcome>(P));
  parallel_for(P, cfg.threads, [&](std::size_t path) {
    PathScenario sc = make_scenario(cfg, path, m);
    for (std::size_t s = 0; s < S; ++s) res[s][path] = simulate_path(strategies[s].policy, sc, cfg, m);
  });

  MonteCarloResult out;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> rw(P), pnl(P), q2(P), fa(P), fb(P);
    for (std::size_t i = 0; i < P; ++i) {
      rw[i] = res[s][i].reward;
      pnl[i] = res[s][i].pnl;
      q2[i] = res[s][i].time_avg_q2;
      fa[i] = res[s][i].final_state.fills_ask;
      fb[i] = res[s][i].final_state.fills_bid;
    }
    DiagnosticsRow row;
    row.strategy = strategies[s].name;
    row.ce = ce_from_samples(rw, m.gamma());
    row.ce_std_error = ce_standard_error(rw, m.gamma());
    row.mean_reward = mean_of(rw);
    row.std_reward = sd_of(rw, row.mean_reward);
    row.sharpe = row.std_reward > 0.0 ? row.mean_reward / row.std_reward : 0.0;
    row.mean_pnl = mean_of(pnl);
    row.time_avg_q2 = mean_of(q2);
    row.mean_fills_ask = mean_of(fa);
    row.mean_fills_bid = mean_of(fb);
    out.rows.push_back(row);
    out.rewards.push_back(std::move(rw));
  }
  return out;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  CsvWriter w(os, {"strategy", "ce", "mean_reward", "std_reward", "sharpe", "mean_pnl", "time_avg_q2",
                   "ce_std_error", "mean_fills_ask", "mean_fills_bid"});
  for (const auto& r : rows)
    w.row(std::vector<std::string>{r.strategy, format_double(r.ce), format_double(r.mean_reward),
                                   format_double(r.std_reward), format_double(r.sharpe), format_double(r.mean_pnl),
                                   format_double(r.time_avg_q2), format_double(r.ce_std_error),
                                   format_double(r.mean_fills_ask), format_double(r.mean_fills_bid)});
}

void write_rewards_csv(std::ostream& os, const std::vector<Strategy>& strategies, const MonteCarloResult& r) {
  std::vector<std::string> header{"path"};
  for (const auto& s : strategies) header.push_back(s.name);
  CsvWriter w(os, header);
  if (r.rewards.empty()) return;
  for (std::size_t i = 0; i < r.rewards.front().size(); ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (const auto& col : r.rewards) row.push_back(col[i]);
    w.row(row);
  }
}

}  // namespace rsmm
