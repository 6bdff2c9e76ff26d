#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsmm/model.hpp"
#include "rsmm/report.hpp"
#include "rsmm/simulator.hpp"

namespace rsmm {

struct ExperimentConfig {
  ModelParams model;

  std::vector<double> h_grid{0.02, 0.01, 0.005, 0.0025, 0.00125};
  double value_lambda = 0.005;
  std::vector<double> lambda_grid{0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005};
  std::size_t tail_points = 5;
  std::vector<std::pair<double, double>> coupled_path{
      {0.02, 0.05}, {0.01, 0.02}, {0.005, 0.01}, {0.0025, 0.005}, {0.00125, 0.002}};
  std::vector<double> exact_h_grid{0.05, 0.025, 0.0125, 0.00625};
  double exact_lambda = 0.02;
  int random_phi_count = 5;
  double random_phi_scale = 0.5;
  std::vector<double> gamma_grid{0.01, 0.02, 0.05, 0.10, 0.20, 0.50, 1.0, 2.0, 5.0, 10.0};
  double sweep_h = 0.0025;
  double sweep_lambda = 0.005;

  int hamiltonian_nodes = 61;
  int exact_nodes = 17;
  int reference_nodes = 321;
  std::vector<int> quadrature_nodes{21, 41, 81, 161};
  double quadrature_lambda = 0.005;
  double reference_step = 1e-3;

  SimConfig sim;
  double mc_proxy_h = 0.00125;
  double mc_proxy_lambda = 0.002;
  Quote constant_quote{0.3, 0.3};
  double linear_c0 = 0.3;
  double linear_c1 = 0.04;

  std::map<std::string, CheckSpec> checks = default_checks();

  static std::map<std::string, CheckSpec> default_checks();
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// unspecified fields keep their defaults; "checks" entries override per name
void from_json(const nlohmann::json& j, ExperimentConfig& c);

const std::vector<std::string>& experiment_names();

// throws std::invalid_argument listing the valid names for an unknown experiment
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

double error_scale(double h, double lambda);  // h + lambda (1 + |log lambda|)

}  // namespace rsmm
