#include "rsmm/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rsmm/csv.hpp"

namespace rsmm {

TimeGrid::TimeGrid(double horizon, int steps) : T_(horizon), N_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
}

TimeGrid TimeGrid::from_step(double horizon, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: step must be > 0");
  double r = horizon / h;
  double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * r)
    throw std::invalid_argument("TimeGrid: horizon " + std::to_string(horizon) + " is not a multiple of step " +
                                std::to_string(h));
  return TimeGrid(horizon, static_cast<int>(n));
}

int TimeGrid::interval(double t) const {
  if (t < 0.0 || t > T_) throw std::out_of_range("TimeGrid: time outside [0, T]");
  int n = static_cast<int>(std::floor(t / step()));
  return std::clamp(n, 0, N_ - 1);
}

bool TimeGrid::nests_in(const TimeGrid& fine) const {
  return std::abs(T_ - fine.T_) <= 1e-12 * T_ && fine.N_ % N_ == 0;
}

Trajectory Trajectory::restrict_to(const TimeGrid& coarse) const {
  if (!coarse.nests_in(grid)) throw std::invalid_argument("Trajectory: grids are not nested");
  int stride = grid.steps() / coarse.steps();
  Trajectory r{coarse, {}};
  r.values.reserve(static_cast<std::size_t>(coarse.steps()) + 1);
  for (int n = 0; n <= coarse.steps(); ++n) r.values.push_back(at(n * stride));
  return r;
}

namespace {

void check_state(const ValueVector& v, int n) {
  if (!v.all_finite())
    throw std::runtime_error("integration failure: non-finite state at time index " + std::to_string(n));
}

}  // namespace

Trajectory rk4_solve(const VectorField& field, const ValueVector& terminal, const TimeGrid& grid) {
  return rk4_solve([&](int, const ValueVector& y) { return field(y); }, terminal, grid, 1);
}

Trajectory rk4_solve(const IntervalField& field, const ValueVector& terminal, const TimeGrid& grid,
                     int substeps) {
  if (substeps < 1) throw std::invalid_argument("rk4_solve: substeps must be >= 1");
  check_state(terminal, grid.steps());
  const int N = grid.steps();
  const double h = grid.step() / substeps;
  Trajectory tr{grid, std::vector<ValueVector>(static_cast<std::size_t>(N) + 1)};
  tr.values[N] = terminal;
  ValueVector y = terminal;
  for (int n = N - 1; n >= 0; --n) {
    for (int s = 0; s < substeps; ++s) {
      ValueVector k1 = field(n, y);
      ValueVector k2 = field(n, ValueVector(y).add_scaled(0.5 * h, k1));
      ValueVector k3 = field(n, ValueVector(y).add_scaled(0.5 * h, k2));
      ValueVector k4 = field(n, ValueVector(y).add_scaled(h, k3));
      k2 += k3;
      y.add_scaled(h / 6.0, k1).add_scaled(h / 3.0, k2).add_scaled(h / 6.0, k4);
    }
    check_state(y, n);
    tr.values[n] = y;
  }
  return tr;
}

Trajectory euler_backward(const VectorField& field, const ValueVector& terminal, const TimeGrid& grid) {
  check_state(terminal, grid.steps());
  const int N = grid.steps();
  const double h = grid.step();
  Trajectory tr{grid, std::vector<ValueVector>(static_cast<std::size_t>(N) + 1)};
  tr.values[N] = terminal;
  for (int n = N - 1; n >= 0; --n) {
    ValueVector y = tr.values[n + 1];
    y.add_scaled(h, field(tr.values[n + 1]));
    check_state(y, n);
    tr.values[n] = std::move(y);
  }
  return tr;
}

Trajectory euler_soft_scheme(double lambda, const TimeGrid& grid, const ActionGrid& actions, const Model& m) {
  if (!(lambda > 0.0)) throw std::domain_error("euler_soft_scheme: lambda must be > 0");
  return euler_backward([&](const ValueVector& y) { return soft_field(y, lambda, actions, m); }, m.terminal(),
                        grid);
}

Trajectory solve_hard(const TimeGrid& grid, const ActionGrid& actions, const Model& m) {
  return rk4_solve([&](const ValueVector& y) { return hard_field(y, actions, m); }, m.terminal(), grid);
}

Trajectory solve_soft(double lambda, const TimeGrid& grid, const ActionGrid& actions, const Model& m) {
  if (!(lambda > 0.0)) throw std::domain_error("solve_soft: lambda must be > 0");
  return rk4_solve([&](const ValueVector& y) { return soft_field(y, lambda, actions, m); }, m.terminal(), grid);
}

PolicyMoments::PolicyMoments(TimeGrid g, int qm)
    : grid(g), q_max(qm), table(static_cast<std::size_t>(g.steps()) * (2 * qm + 1)) {}

FillMoments& PolicyMoments::at(int n, int q) {
  return table.at(static_cast<std::size_t>(n) * (2 * q_max + 1) + static_cast<std::size_t>(q + q_max));
}

const FillMoments& PolicyMoments::at(int n, int q) const {
  return table.at(static_cast<std::size_t>(n) * (2 * q_max + 1) + static_cast<std::size_t>(q + q_max));
}

int substeps_for(double h, double max_step) {
  return std::max(1, static_cast<int>(std::ceil(h / max_step - 1e-9)));
}

Trajectory policy_evaluation_ode(const PolicyMoments& pol, const Model& m, double max_step) {
  if (pol.q_max != m.q_max()) throw std::invalid_argument("policy_evaluation_ode: inventory bound mismatch");
  if (std::abs(pol.grid.horizon() - m.params().horizon) > 1e-12)
    throw std::invalid_argument("policy_evaluation_ode: policy grid horizon differs from model horizon");
  IntervalField f = [&](int n, const ValueVector& y) {
    ValueVector out(m.q_max());
    for (int q = -m.q_max(); q <= m.q_max(); ++q) out[q] = averaged_hamiltonian(q, y, pol.at(n, q), m);
    return out;
  };
  return rk4_solve(f, m.terminal(), pol.grid, substeps_for(pol.grid.step(), max_step));
}

int nested_reference_steps(double horizon, const std::vector<int>& steps, double max_step) {
  long long l = 1;
  for (int s : steps) {
    if (s < 1) throw std::invalid_argument("nested_reference_steps: step counts must be >= 1");
    l = std::lcm(l, static_cast<long long>(s));
  }
  long long k = std::max<long long>(1, static_cast<long long>(std::ceil(horizon / (max_step * l) - 1e-9)));
  return static_cast<int>(l * k);
}

double grid_sup_error(const Trajectory& a, const Trajectory& b) {
  if (a.values.empty() || b.values.empty()) throw std::invalid_argument("grid_sup_error: empty trajectory");
  if (a.values.front().size() != b.values.front().size())
    throw std::invalid_argument("grid_sup_error: inventory dimension mismatch");
  if (!a.grid.nests_in(b.grid)) throw std::invalid_argument("grid_sup_error: grids are not nested");
  int stride = b.grid.steps() / a.grid.steps();
  double e = 0.0;
  for (int n = 0; n <= a.grid.steps(); ++n) e = std::max(e, a.at(n).sup_distance(b.at(n * stride)));
  return e;
}

double left_riemann(const std::vector<double>& series, double h) {
  double s = 0.0;
  for (double v : series) s += h * v;
  return s;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  CsvWriter w(os, {"n", "t", "q", "value"});
  for (int n = 0; n <= tr.grid.steps(); ++n)
    for (int q = -tr.at(n).q_max(); q <= tr.at(n).q_max(); ++q)
      w.row({static_cast<double>(n), tr.grid.time(n), static_cast<double>(q), tr.at(n)[q]});
}

}  // namespace rsmm
