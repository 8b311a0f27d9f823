#pragma once

#include <map>
#include <string>
#include <vector>

#include "homog/finescale.hpp"
#include "homog/geometry.hpp"

namespace homog {

struct ExperimentConfig {
  InclusionSpec inclusion;
  CoefficientField coeff;
  int cell_resolution = 64;
  int macro_resolution_per_cell = 16;
  int hom_resolution = 128;

  double tol_cell = 1e-10;
  double tol_macro = 1e-8;
  double max_iter_factor = 50.0;
  double stab_beta = 0.05;
  double mu_pen = 1e6;

  double Re = 1.0;
  double Fr = 1.0;
  double S = 1.0;
  double f_const = 1.0;
  std::string k_preset = "x1";  // "x1" | "x2" | "zero" | numeric constant
  Vec2 g_body{0.0, -1.0};
  bool with_stokes = true;

  std::vector<int> sweep_m{4, 8, 16, 32};  // epsilon = 1/m, strictly increasing m

  std::string out_dir = "out";
  std::string formats = "csv";  // csv | json | both
  int workers = 1;
  unsigned seed = 12345;

  PhysicalParams physical() const;
  std::function<double(const Vec2&)> k_fn() const;
  std::string cell_hash() const;    // geometry + cell-solver settings
  std::string config_hash() const;  // whole config
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_text(const ExperimentConfig& c);

}  // namespace homog
