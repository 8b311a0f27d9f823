#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "homog/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format;
  int workers = 0;
  long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Experiment config file (INI-style)");
  cmd->add_option("--out", o.out_dir, "Output directory (overrides config)");
  cmd->add_option("--workers", o.workers, "Worker threads (overrides config)");
  cmd->add_option("--format", o.format, "Report format: csv, json or both");
  cmd->add_option("--seed", o.seed, "Sampling seed (overrides config)");
}

homog::ExperimentConfig resolve(const CommonOpts& o) {
  homog::ExperimentConfig c =
      o.config_path.empty() ? homog::ExperimentConfig{} : homog::load_config(o.config_path);
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.format.empty()) c.formats = o.format;
  if (o.workers > 0) c.workers = o.workers;
  if (o.seed >= 0) c.seed = static_cast<unsigned>(o.seed);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic-suspension homogenization toolkit"};
  app.require_subcommand(1);

  CommonOpts cell_o, sweep_o, check_o, report_o;
  CLI::App* cell = app.add_subcommand("cell", "Solve the cell problems and emit tensor CSVs");
  add_common(cell, cell_o);
  bool no_cache = false;
  cell->add_flag("--no-cache", no_cache, "Ignore and overwrite any cached cell solution");

  CLI::App* sweep = app.add_subcommand("sweep", "Run the full epsilon sweep and emit reports");
  add_common(sweep, sweep_o);

  CLI::App* chk = app.add_subcommand("check", "Validate a config without solving anything");
  add_common(chk, check_o);

  CLI::App* rep = app.add_subcommand("report", "Re-emit reports from a previously run sweep");
  add_common(rep, report_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cell->parsed()) {
      const homog::ExperimentConfig c = resolve(cell_o);
      const homog::CellPipelineResult r = homog::run_cell_pipeline(c, !no_cache);
      std::printf("cell: resolution=%d solid_fraction=%.6f lh_beta=%.6g%s\n",
                  c.cell_resolution, r.solid_fraction, r.lh_beta,
                  r.from_cache ? " (cached)" : "");
      std::printf("A = [%.8g %.8g; %.8g %.8g]\n", r.tensors.A(0, 0), r.tensors.A(0, 1),
                  r.tensors.A(1, 0), r.tensors.A(1, 1));
      std::printf("tensor CSVs written to %s\n", c.out_dir.c_str());
    } else if (sweep->parsed()) {
      const homog::ExperimentConfig c = resolve(sweep_o);
      const homog::CellPipelineResult r = homog::run_cell_pipeline(c);
      const homog::ReportBundle bundle = homog::run_sweep(c, r);
      homog::emit_reports(bundle, c);
      for (const homog::SweepRow& row : bundle.rows)
        std::printf("eps=%-8g err_grad_phi=%-12.6g (nocorr %-12.6g) sup_grad_phi=%-10.6g %s\n",
                    row.conv.epsilon, row.conv.err_grad_phi, row.conv.err_grad_phi_nocorr,
                    row.conv.sup_grad_phi, row.failed ? ("FAILED: " + row.error).c_str() : "ok");
      std::printf("reports written to %s (%s)\n", c.out_dir.c_str(),
                  bundle.partial ? "partial" : "complete");
      if (bundle.partial) return 3;
    } else if (chk->parsed()) {
      const homog::ExperimentConfig c = resolve(check_o);
      std::printf("config ok (hash %s, cell hash %s)\n", c.config_hash().c_str(),
                  c.cell_hash().c_str());
    } else if (rep->parsed()) {
      const homog::ExperimentConfig c = resolve(report_o);
      homog::reemit_from_cache(c);
      std::printf("reports re-emitted to %s\n", c.out_dir.c_str());
    }
  } catch (const homog::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const homog::InvariantError& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 4;
  } catch (const homog::SolveError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
