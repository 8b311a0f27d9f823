#pragma once

#include "homog/config.hpp"
#include "homog/homogenized.hpp"

namespace homog {

struct CellPipelineResult {
  CellGeometry cell;
  ScalarCellSolution scalar;
  StokesCellSolution stokes;
  EffectiveTensors tensors;
  double lh_beta = 0.0;           // measured Legendre-Hadamard constant
  double solid_fraction = 0.0;
  bool from_cache = false;
};

struct SweepRow {
  ConvergenceRow conv;
  double rigidity_fraction = 0.0;
  double max_particle_force = 0.0;
  int scalar_iterations = 0;
  int stokes_iterations = 0;
  bool failed = false;
  std::string error;
};

struct ReportBundle {
  EffectiveTensors tensors;
  std::vector<SweepRow> rows;
  std::string config_hash;
  bool partial = false;
  double lh_beta = 0.0;
};

/// Computes omega, chi, xi and the effective tensors; asserts every tensor
/// invariant before returning and persists the tensor CSVs under the output
/// directory. Results are cached under out/cache/<cell-hash>.
CellPipelineResult run_cell_pipeline(const ExperimentConfig& config, bool use_cache = true);

/// Full pipeline over the epsilon sweep; per-epsilon failures are recorded
/// and the sweep continues.
ReportBundle run_sweep(const ExperimentConfig& config, const CellPipelineResult& cellres);

void emit_reports(const ReportBundle& bundle, const ExperimentConfig& config);

/// Re-emits reports from the persisted JSON bundle; throws if no bundle has
/// been produced for this config yet.
void reemit_from_cache(const ExperimentConfig& config);

// CSV helpers shared with the CLI and tests.
void write_tensor_csvs(const EffectiveTensors& t, const std::string& dir);

}  // namespace homog
