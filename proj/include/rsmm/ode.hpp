#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "rsmm/model.hpp"
#include "rsmm/quadrature.hpp"

namespace rsmm {

class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);
  // requires horizon / h to be an integer (to 1e-9 relative)
  static TimeGrid from_step(double horizon, double h);

  double horizon() const { return T_; }
  int steps() const { return N_; }
  double step() const { return T_ / N_; }
  double time(int n) const { return n == N_ ? T_ : n * step(); }
  // interval index n with t in [t_n, t_{n+1}); t = T maps to N - 1
  int interval(double t) const;
  bool nests_in(const TimeGrid& fine) const;  // every point of *this is a point of fine

  bool operator==(const TimeGrid&) const = default;

 private:
  double T_;
  int N_;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<ValueVector> values;  // N + 1 entries, values[n] at t_n

  const ValueVector& at(int n) const { return values.at(static_cast<std::size_t>(n)); }
  const ValueVector& initial() const { return values.front(); }
  const ValueVector& terminal() const { return values.back(); }
  // sample a nested finer trajectory on a coarser grid
  Trajectory restrict_to(const TimeGrid& coarse) const;
};

using VectorField = std::function<ValueVector(const ValueVector&)>;
// field that may depend on the interval index n of the original time grid
using IntervalField = std::function<ValueVector(int n, const ValueVector&)>;

// RK4 forward in tau = T - t from the terminal condition. With substeps > 1 each
// grid interval is split into that many RK4 steps and the field receives the
// interval index, so piecewise-constant controls are integrated exactly per interval.
Trajectory rk4_solve(const VectorField& field, const ValueVector& terminal, const TimeGrid& grid);
Trajectory rk4_solve(const IntervalField& field, const ValueVector& terminal, const TimeGrid& grid,
                     int substeps);

Trajectory euler_backward(const VectorField& field, const ValueVector& terminal, const TimeGrid& grid);
Trajectory euler_soft_scheme(double lambda, const TimeGrid& grid, const ActionGrid& actions, const Model& m);

Trajectory solve_hard(const TimeGrid& grid, const ActionGrid& actions, const Model& m);
Trajectory solve_soft(double lambda, const TimeGrid& grid, const ActionGrid& actions, const Model& m);

// Per-interval, per-inventory fill moments of a quote policy.
struct PolicyMoments {
  TimeGrid grid;
  int q_max = 0;
  std::vector<FillMoments> table;  // [n * (2Q+1) + (q + Q)]

  PolicyMoments(TimeGrid g, int q_max);
  FillMoments& at(int n, int q);
  const FillMoments& at(int n, int q) const;
};

// number of RK4 substeps so that the evaluation step is <= max_step
int substeps_for(double h, double max_step = 1e-3);

Trajectory policy_evaluation_ode(const PolicyMoments& policy, const Model& m, double max_step = 1e-3);

// smallest multiple of lcm(steps) whose step is <= max_step
int nested_reference_steps(double horizon, const std::vector<int>& steps, double max_step = 1e-3);

// sup over (n, q) of |a - b|; b may be finer if a's grid nests in it
double grid_sup_error(const Trajectory& a, const Trajectory& b);
double left_riemann(const std::vector<double>& series, double h);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace rsmm
