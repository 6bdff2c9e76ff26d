#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsmm/model.hpp"
#include "rsmm/policy.hpp"

namespace rsmm {

struct SimConfig {
  int paths = 5000;
  std::uint64_t seed = 12345;
  double substep = 1e-3;  // Brownian skeleton step
  int threads = 1;
  double cash0 = 0.0;
  double mid0 = 0.0;
  int inventory0 = 0;

  void validate(const Model& m) const;
};

// Random inputs of one path, shared by every strategy (common random numbers).
struct PathScenario {
  std::vector<double> ask_times, bid_times;
  std::vector<double> ask_mark, ask_accept, bid_mark, bid_accept;
  // Midprice skeleton: union of the substep grid and all proposal times.
  std::vector<double> times;
  std::vector<double> mid;
  std::vector<int> event;  // -1 none, 2k ask proposal k, 2k+1 bid proposal k
};

enum class RngStream : std::uint64_t { ask_times = 0, bid_times, brownian, ask_mark, ask_accept, bid_mark, bid_accept };

PathScenario make_scenario(const SimConfig& cfg, std::uint64_t path_index, const Model& m);

struct PathState {
  double cash = 0.0;
  double mid = 0.0;
  int inventory = 0;
  double penalty = 0.0;  // int eta q^2 du
  double q2_integral = 0.0;
  int fills_ask = 0, fills_bid = 0;
};

struct PathOutcome {
  double reward = 0.0;  // X_T + q_T S_T - Phi q_T^2 - int eta q^2
  double pnl = 0.0;     // X_T + q_T S_T
  double time_avg_q2 = 0.0;
  PathState final_state;
  double spread_income = 0.0;   // sum of accepted offsets
  double inventory_gain = 0.0;  // sum q_{u-} dS over the skeleton
  int min_inventory = 0, max_inventory = 0;
};

PathOutcome simulate_path(const Policy& policy, const PathScenario& sc, const SimConfig& cfg, const Model& m);
PathOutcome simulate_path(const Policy& policy, const SimConfig& cfg, std::uint64_t path_index, const Model& m);

struct Strategy {
  std::string name;
  Policy policy;
};

struct DiagnosticsRow {
  std::string strategy;
  double ce = 0.0;
  double ce_std_error = 0.0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double sharpe = 0.0;
  double mean_pnl = 0.0;
  double time_avg_q2 = 0.0;
  double mean_fills_ask = 0.0;
  double mean_fills_bid = 0.0;
};

struct MonteCarloResult {
  std::vector<DiagnosticsRow> rows;
  std::vector<std::vector<double>> rewards;  // [strategy][path]
};

MonteCarloResult run_monte_carlo(const std::vector<Strategy>& strategies, const SimConfig& cfg, const Model& m);

double pairwise_sum(const double* x, std::size_t n);
double ce_from_samples(const std::vector<double>& rewards, double gamma);
// delta-method standard error of the CE estimator
double ce_standard_error(const std::vector<double>& rewards, double gamma);

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
void write_rewards_csv(std::ostream& os, const std::vector<Strategy>& strategies, const MonteCarloResult& r);

}  // namespace rsmm
