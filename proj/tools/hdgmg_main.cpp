// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "hdgmg/config.hpp"
#include "hdgmg/runner.hpp"

namespace
{

struct SubArgs
{
  hdgmg::RunOptions opt;
  bool selected = false;
};

void add_common(CLI::App *sub, SubArgs &args)
{
  sub->add_option("--config", args.opt.config_path, "configuration file")->required();
  sub->add_option("--out", args.opt.out_dir, "output directory")->required();
  sub->add_option("--seed", args.opt.seed, "seed recorded in the manifest");
  sub->add_option("--threads", args.opt.threads, "thread count recorded in the manifest");
  sub->add_flag("--timing", args.opt.timing, "write real wall times instead of masked 0.000");
  sub->callback([&args]() { args.selected = true; });
}

int dispatch(const std::string &family, const SubArgs &args)
{
  const hdgmg::Config cfg = hdgmg::Config::from_file(args.opt.config_path);
  const std::string mode = cfg.str("mode");
  if (hdgmg::mode_family(mode) != family)
  {
    std::fprintf(stderr, "hdgmg: config mode '%s' does not belong to the '%s' subcommand\n",
                 mode.c_str(), family.c_str());
    return 1;
  }
  return hdgmg::run(args.opt);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Multilevel HDG solver for the high-wave-number Helmholtz equation"};
  app.require_subcommand(1);

  SubArgs solve_args, lfa_args, stab_args;
  add_common(app.add_subcommand("solve", "assemble and solve a Helmholtz problem"),
             solve_args);
  add_common(app.add_subcommand("lfa", "one-dimensional local Fourier analysis"), lfa_args);
  add_common(app.add_subcommand("stability", "prolongation energy-stability check"),
             stab_args);

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (solve_args.selected)
      return dispatch("solve", solve_args);
    if (lfa_args.selected)
      return dispatch("lfa", lfa_args);
    if (stab_args.selected)
      return dispatch("stability", stab_args);
    std::fprintf(stderr, "hdgmg: no subcommand selected\n");
    return 1;
  }
  catch (const hdgmg::ConfigError &e)
  {
    std::fprintf(stderr, "hdgmg: %s\n", e.what());
    return 1;
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "hdgmg: error: %s\n", e.what());
    return 1;
  }
}
