// Command-line front end for the study drivers.
//
//   smm-rad2d <driver> [--config <file>] [--out <dir>]
//             [--method ip|cg|rt|hrt|all] [--fixup on|off] [--anderson N]
//
// The driver name may instead come from a `driver = <name>` line in the
// configuration file.  Command-line options override configuration values.
// The exit code is 0 only if the driver's built-in checks all pass.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smm/config.hpp"
#include "smm/drivers.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-dimensional radiation-transport moment-method driver"};
  app.footer(
      "Drivers: mms, diffusion-limit, multimaterial, sn-convergence.\n"
      "Each run writes report.csv and effective-config.txt (plus lineout.csv\n"
      "for diffusion-limit) into the output directory.");

  std::string driver, config_path, out_dir, method, fixup;
  int anderson = -1;
  app.add_option("driver", driver, "Driver name (or set `driver = ...` in the config file)");
  app.add_option("--config", config_path, "Configuration file (key = value lines)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (default: out/<driver>)");
  app.add_option("--method", method, "Override the methods the driver runs");
  app.add_option("--fixup", fixup, "Override the negativity-fixup setting (on|off)");
  app.add_option("--anderson", anderson, "Override the acceleration window size");

  CLI11_PARSE(app, argc, argv);

  try {
    smm::Config cfg;
    if (!config_path.empty()) cfg = smm::Config::parse_file(config_path);

    // The driver may be named on the command line, in the file, or both
    // (in which case they must agree).
    const std::string cfg_driver = cfg.get_string("driver", "");
    if (driver.empty()) driver = cfg_driver;
    if (driver.empty()) {
      std::cerr << "error: no driver named; pass one as the first argument or set "
                   "`driver = ...` in the config file\n";
      return 2;
    }
    if (!cfg_driver.empty() && cfg_driver != driver) {
      std::cerr << "error: driver '" << driver << "' on the command line but '" << cfg_driver
                << "' in the config file\n";
      return 2;
    }

    if (!method.empty()) cfg.set("methods", method);
    if (!fixup.empty()) cfg.set("fixup", fixup);
    if (anderson >= 0) cfg.set("anderson", std::to_string(anderson));
    if (out_dir.empty()) out_dir = "out/" + driver;

    const smm::DriverResult res = smm::run_driver(driver, cfg, out_dir);
    for (const std::string& line : res.checks) std::cout << line << "\n";
    std::cout << res.summary << "\n";
    std::cout << "outputs written to " << out_dir << "\n";
    return res.passed ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
