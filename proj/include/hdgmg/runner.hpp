// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_RUNNER_HPP
#define HDGMG_RUNNER_HPP

#include <string>

namespace hdgmg
{

struct RunOptions
{
  std::string config_path;
  std::string out_dir;
  unsigned seed = 12345;
  int threads = 1;
  bool timing = false;  // write real wall times instead of masked 0.000
};

// Executes the mode selected by the configuration file and writes all
// artifacts (CSV tables, SVG plots, manifest.json) into out_dir.  Returns 0
// on success and 2 when an iterative solve failed to reach its tolerance.
// Throws ConfigError on configuration problems.
int run(const RunOptions &opt);

// "solve", "lfa", or "stability"; empty for an unknown mode.
std::string mode_family(const std::string &mode);

// Automatic coarsest mesh size: the power of two closest (in log) to the
// resolution with kappa h_T / p = 2, i.e. n0 = 2^round(log2(kappa sqrt(2) / (2 p))).
int auto_n0(double kappa, int p);

}  // namespace hdgmg

#endif  // HDGMG_RUNNER_HPP
