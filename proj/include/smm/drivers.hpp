#pragma once

// Study drivers behind the command-line tool: each one sets up a family of
// problems, runs the requested solves, writes CSV reports into an output
// directory, and evaluates its built-in checks.
//
// Common behavior:
//   * Missing configuration keys are filled with documented defaults and the
//     complete effective configuration is written to
//     <out_dir>/effective-config.txt (re-parseable).
//   * Unknown configuration keys are an error.
//   * <out_dir>/report.csv has a fixed column schema per driver; rerunning
//     with the same configuration reproduces every non-timing column.
//   * The returned checks record each built-in pass/fail criterion;
//     `passed` is their conjunction.  Numeric results are also exposed in
//     `metrics` under stable dotted names for programmatic use.

#include <map>
#include <string>
#include <vector>

#include "smm/config.hpp"

namespace smm {

struct DriverResult {
  bool passed = false;
  std::string summary;               // one-line outcome
  std::vector<std::string> checks;   // "ok: ..." / "FAIL: ..." lines
  std::map<std::string, double> metrics;
};

/// Manufactured-solution accuracy study: project the manufactured angular
/// flux, build the closure data, solve each moment discretization in
/// isolation on a refinement sequence, and fit convergence orders.
DriverResult run_mms(Config cfg, const std::string& out_dir);

/// Thick diffusion limit: scaled cross sections sigma_t = 1/eps,
/// sigma_a = eps, q = eps on an orthogonal mesh; counts fixed-point
/// iterations per eps and writes a midline lineout of the scalar flux.
DriverResult run_diffusion_limit(Config cfg, const std::string& out_dir);

/// Multi-material channel problem (optically thin channel through a thick
/// wall): Anderson-accelerated coupled solves across mesh refinements with
/// the negativity fixup on and off; reports outer/inner iteration counts.
DriverResult run_multimaterial(Config cfg, const std::string& out_dir);

/// Direct comparison of the coupled moment-method scalar flux against an
/// independently accelerated discrete-ordinates solve on Chebyshev-spaced
/// meshes; fits the order of the difference norm.
DriverResult run_sn_convergence(Config cfg, const std::string& out_dir);

/// Dispatch by name: "mms", "diffusion-limit", "multimaterial",
/// "sn-convergence".  Throws std::invalid_argument for unknown names.
DriverResult run_driver(const std::string& name, Config cfg, const std::string& out_dir);

/// Names accepted by run_driver, in documentation order.
std::vector<std::string> driver_names();

}  // namespace smm
