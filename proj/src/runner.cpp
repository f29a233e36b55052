// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/runner.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hdgmg/config.hpp"
#include "hdgmg/hdg.hpp"
#include "hdgmg/io.hpp"
#include "hdgmg/kernels.hpp"
#include "hdgmg/lfa.hpp"
#include "hdgmg/mesh.hpp"
#include "hdgmg/multilevel.hpp"
#include "hdgmg/problems.hpp"
#include "hdgmg/solvers.hpp"
#include "hdgmg/transfer.hpp"
#include "json.hpp"

namespace hdgmg
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;
constexpr double kPi = 3.14159265358979323846;
constexpr double kResTol = 1e-10;  // resonance exclusion, matching the LFA sweeps

[[noreturn]] void fail_key(const Config &cfg, const std::string &key, const std::string &msg)
{
  int line = cfg.line_of(key);
  if (line > 0)
    throw ConfigError(cfg.name() + ":" + std::to_string(line) + ": key '" + key + "': " + msg);
  throw ConfigError(cfg.name() + ": key '" + key + "': " + msg);
}

bool verbose()
{
  const char *v = std::getenv("HDGMG_VERBOSE");
  return v != nullptr && v[0] != '\0' && !(v[0] == '0' && v[1] == '\0');
}

double seconds_since(const std::chrono::steady_clock::time_point &t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string hash_hex(const std::string &text)
{
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(io::fnv1a(text)));
  return buf;
}

struct Artifacts
{
  fs::path dir;
  std::vector<std::string> outputs;

  void write(const std::string &name, const std::string &content)
  {
    io::write_file((dir / name).string(), content);
    outputs.push_back(name);
  }
};

void write_manifest(const Artifacts &art, const RunOptions &opt, const Config &cfg,
                    const std::string &mode, const json &results)
{
  json m;
  m["mode"] = mode;
  m["config_hash"] = hash_hex(cfg.raw_text());
  m["seed"] = opt.seed;
  m["threads"] = opt.threads;
  m["kernel_backend"] = kernels::backend_name();
  m["outputs"] = art.outputs;
  m["results"] = results;
  io::write_file((art.dir / "manifest.json").string(), m.dump(2) + "\n");
}

template <typename M>
double spectral_radius(const M &A)
{
  Eigen::ComplexEigenSolver<M> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double alias_freq(double theta)
{
  return theta - (theta >= 0.0 ? kPi : -kPi);
}

// ---------------------------------------------------------------- solve mode

int run_solve(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "problem", "kappa", "direction", "p", "levels", "n0", "alpha",
                     "mu", "omega", "m", "m1", "m2", "m3", "m4", "smoother", "gmres_smoothing",
                     "correction", "tol", "max_iter", "outer", "x0", "y0", "extent",
                     "cave.kappa3", "cave.q1", "cave.q2", "cave.mid_box", "cave.inner_box"});

  const std::string problem = cfg.str_or("problem", "bessel");
  const int p = cfg.integer_or("p", 1);
  if (p < 1 || p > 4)
    fail_key(cfg, "p", "degree must be between 1 and 4");
  const double x0 = cfg.num_or("x0", -0.5), y0 = cfg.num_or("y0", -0.5);
  const double extent = cfg.num_or("extent", 1.0);
  if (!(extent > 0.0))
    fail_key(cfg, "extent", "must be positive");

  CyclePlan plan;
  plan.alpha = cfg.num_or("alpha", 0.5);
  plan.mu = cfg.num_or("mu", 0.5);
  const int m_all = cfg.integer_or("m", 2);
  plan.m1 = cfg.integer_or("m1", m_all);
  plan.m2 = cfg.integer_or("m2", m_all);
  plan.m3 = cfg.integer_or("m3", m_all);
  plan.m4 = cfg.integer_or("m4", m_all);
  plan.omega = cfg.num_or("omega", 0.6);
  const std::string sm = cfg.str_or("smoother", "gs");
  if (sm == "gs")
    plan.relax = CyclePlan::Relax::gs;
  else if (sm == "jacobi")
    plan.relax = CyclePlan::Relax::jacobi;
  else
    fail_key(cfg, "smoother", "expected 'gs' or 'jacobi', got '" + sm + "'");
  const std::string style = cfg.str_or("gmres_smoothing", "stepwise");
  if (style == "stepwise")
    plan.gmres_style = CyclePlan::GmresStyle::stepwise;
  else if (style == "batch")
    plan.gmres_style = CyclePlan::GmresStyle::batch;
  else
    fail_key(cfg, "gmres_smoothing", "expected 'stepwise' or 'batch', got '" + style + "'");
  const std::string corr = cfg.str_or("correction", "literal");
  if (corr == "literal")
    plan.source = CyclePlan::Source::finest;
  else if (corr == "recursive")
    plan.source = CyclePlan::Source::recursive;
  else
    fail_key(cfg, "correction", "expected 'literal' or 'recursive', got '" + corr + "'");

  const double tol = cfg.num_or("tol", 1e-6);
  const int max_iter = cfg.integer_or("max_iter", 200);
  const std::string outer = cfg.str_or("outer", "left-gmres");
  bool left_prec = true;
  if (outer == "fgmres")
    left_prec = false;
  else if (outer != "left-gmres")
    fail_key(cfg, "outer", "expected 'left-gmres' or 'fgmres', got '" + outer + "'");

  HelmholtzProblem prob;
  SecondOrderProblem second;
  CaveConfig cave;
  double kappa_max = 0.0;
  const bool is_cave = (problem == "cave");
  if (problem == "bessel" || problem == "plane-wave")
  {
    const double kappa = cfg.num_or("kappa", 10.0);
    if (!(kappa > 0.0))
      fail_key(cfg, "kappa", "must be positive");
    if (problem == "bessel")
      second = bessel_example(kappa);
    else
    {
      std::vector<double> d = cfg.num_list_or("direction", {1.0, 0.0});
      if (d.size() != 2)
        fail_key(cfg, "direction", "expected two components");
      second = plane_wave_example(kappa, d[0], d[1]);
    }
    prob = to_mixed_form(second, p, x0, y0, extent);
    kappa_max = kappa;
  }
  else if (is_cave)
  {
    cave.kappa3 = cfg.num_or("cave.kappa3", 100.0);
    cave.q1 = cfg.num_or("cave.q1", 4.0);
    cave.q2 = cfg.num_or("cave.q2", 2.0);
    if (!(cave.kappa3 > 0.0))
      fail_key(cfg, "cave.kappa3", "must be positive");
    if (!(cave.q1 >= 1.0) || !(cave.q2 >= 1.0))
      fail_key(cfg, "cave.q1", "contrasts q1, q2 must be >= 1");
    std::vector<double> mb = cfg.num_list_or("cave.mid_box", {-0.25, -0.25, 0.25, 0.25});
    std::vector<double> ib = cfg.num_list_or("cave.inner_box", {-0.125, -0.125, 0.125, 0.125});
    if (mb.size() != 4)
      fail_key(cfg, "cave.mid_box", "expected xmin ymin xmax ymax");
    if (ib.size() != 4)
      fail_key(cfg, "cave.inner_box", "expected xmin ymin xmax ymax");
    for (int i = 0; i < 4; i++)
    {
      cave.mid[i] = mb[static_cast<size_t>(i)];
      cave.inner[i] = ib[static_cast<size_t>(i)];
    }
    prob = cave_problem(cave, p);
    kappa_max = cave.kappa3;
  }
  else
    fail_key(cfg, "problem", "expected 'bessel', 'plane-wave', or 'cave', got '" + problem +
                                 "'");

  std::vector<int> levels = cfg.int_list_or("levels", {3});
  const int n0_cfg = cfg.integer_or("n0", 0);
  if (cfg.has("n0") && n0_cfg < 1)
    fail_key(cfg, "n0", "must be a positive integer");

  std::vector<io::SummaryRow> rows;
  json results = json::array();
  bool all_converged = true;

  for (int nl : levels)
  {
    if (nl < 1)
      fail_key(cfg, "levels", "each entry must be >= 1");
    const int n0 = n0_cfg > 0 ? n0_cfg : auto_n0(kappa_max, p);
    const auto t0 = std::chrono::steady_clock::now();

    MeshHierarchy2D hier = build_hierarchy_2d(n0, nl, x0, y0, extent);
    if (is_cave)
    {
      try
      {
        validate_cave_alignment(hier.meshes.front(), cave);
      }
      catch (const std::invalid_argument &e)
      {
        throw ConfigError(cfg.name() + ": " + e.what());
      }
      for (Mesh2D &mesh : hier.meshes)
        mesh.set_regions(cave_regions(mesh, cave));
    }

    std::vector<std::unique_ptr<HelmholtzAssembler>> asmb;
    for (const Mesh2D &mesh : hier.meshes)
      asmb.push_back(std::make_unique<HelmholtzAssembler>(mesh, prob));
    std::vector<SkeletonSystem> systems;
    for (const auto &a : asmb)
      systems.push_back(a->assemble());

    const int64 n_dofs = systems.back().n_dofs;
    const VecZ b = systems.back().F;
    if (verbose())
    {
      for (size_t l = 0; l < systems.size(); l++)
        std::fprintf(stderr, "[hdgmg] level %zu: n=%d dofs=%lld\n", l, systems[l].n,
                     static_cast<long long>(systems[l].n_dofs));
    }

    GmresResult res;
    if (nl == 1)
    {
      DirectSolverZ direct(systems[0].Ahat);
      res.x.assign(b.size(), cplx(0.0, 0.0));
      direct.solve(systems[0].Fhat.data(), res.x.data());
      VecZ r(b.size());
      kernels::spmv_z(systems[0].A, res.x.data(), r.data());
      kernels::zaxpy(r.size(), cplx(-1.0, 0.0), b.data(), r.data());
      const double bn = std::sqrt(kernels::znrm2sq(b.size(), b.data()));
      const double rel =
          bn > 0.0 ? std::sqrt(kernels::znrm2sq(r.size(), r.data())) / bn : 0.0;
      res.iters = 1;
      res.converged = true;
      res.true_relres = rel;
      res.history = {1.0, rel};
    }
    else
    {
      std::vector<const HelmholtzAssembler *> ptrs;
      for (const auto &a : asmb)
        ptrs.push_back(a.get());
      std::vector<CsrZ> P = build_transfer(hier, ptrs);
      std::vector<double> ratios = switch_ratios(systems, kappa_max, extent);
      if (verbose())
        for (size_t l = 0; l < ratios.size(); l++)
          std::fprintf(stderr, "[hdgmg] level %zu: kappa h_T / p = %.4f (%s smoothing)\n", l,
                       ratios[l], ratios[l] >= plan.alpha ? "gmres" : "relaxation");
      Multilevel ml(std::move(systems), std::move(P), plan, ratios);
      res = ml.solve(b, tol, max_iter, left_prec);
    }

    const double secs = seconds_since(t0);
    all_converged = all_converged && res.converged;

    double trace_err = -1.0;
    if (second.exact)
      trace_err = asmb.back()->trace_error(res.x, second.exact);

    const std::string stem = "residuals_" + std::to_string(nl);
    art.write(stem + ".csv", io::residuals_csv(res.history));
    art.write(stem + ".svg",
              io::svg_semilogy(res.history, "relative residual, levels=" + std::to_string(nl)));

    io::SummaryRow row;
    row.level = nl;
    row.dofs = n_dofs;
    row.iter = res.iters;
    row.seconds = secs;
    rows.push_back(row);

    const double claimed = res.history.empty() ? res.true_relres : res.history.back();
    json jr;
    jr["levels"] = nl;
    jr["n0"] = n0;
    jr["dofs"] = n_dofs;
    jr["iterations"] = res.iters;
    jr["converged"] = res.converged;
    jr["relres"] = claimed;
    jr["true_relres"] = res.true_relres;
    if (trace_err >= 0.0)
      jr["trace_error"] = trace_err;
    results.push_back(jr);

    std::printf("levels=%d n0=%d dofs=%lld iters=%d relres=%s true_relres=%s%s (%.3f s)\n", nl,
                n0, static_cast<long long>(n_dofs), res.iters, io::fmt_e(claimed, 3).c_str(),
                io::fmt_e(res.true_relres, 3).c_str(),
                res.converged ? "" : " [not converged]", secs);
    std::fflush(stdout);
  }

  art.outputs.insert(art.outputs.begin(), "summary.csv");
  io::write_file((art.dir / "summary.csv").string(), io::emit_table(rows, !opt.timing));
  write_manifest(art, opt, cfg, "solve", results);
  return all_converged ? 0 : 2;
}

// ------------------------------------------------------------------ lfa modes

lfa::Smoother smoother_of(const Config &cfg)
{
  const std::string sm = cfg.str_or("smoother", "jacobi");
  if (sm == "jacobi")
    return lfa::Smoother::jacobi;
  if (sm == "gs")
    return lfa::Smoother::gs;
  fail_key(cfg, "smoother", "expected 'jacobi' or 'gs', got '" + sm + "'");
}

int run_lfa_two_level(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "t", "omega", "mu", "samples", "smoother"});
  const std::vector<double> ts = cfg.num_list("t");
  const double omega = cfg.num_or("omega", 0.6), mu = cfg.num_or("mu", 0.5);
  const int samples = cfg.integer_or("samples", 1024);
  const lfa::Smoother sm = smoother_of(cfg);

  std::string csv = "t,theta,rho\n";
  json results = json::array();
  for (double t : ts)
  {
    const lfa::Stencil fine = lfa::stencil_condensed(t);
    const lfa::Stencil coarse = lfa::stencil_condensed(2.0 * t);
    double sup = 0.0, arg = 0.0;
    int used = 0;
    for (int j = 0; j < samples; j++)
    {
      const double th = -kPi / 2.0 + (j + 0.5) * kPi / samples;
      if (std::abs(lfa::symbol(coarse, 2.0 * th)) < kResTol)
        continue;
      if (sm == lfa::Smoother::gs &&
          (std::abs(fine.s1 * std::exp(cplx(0.0, -th)) + fine.s0) < kResTol ||
           std::abs(fine.s1 * std::exp(cplx(0.0, -alias_freq(th))) + fine.s0) < kResTol))
        continue;
      const double r = spectral_radius(lfa::two_level_matrix(t, th, omega, mu, mu, sm));
      used++;
      if (r > sup)
      {
        sup = r;
        arg = th;
      }
      csv += io::fmt_e(t, 6) + "," + io::fmt_e(th) + "," + io::fmt_e(r) + "\n";
    }
    json jr;
    jr["t"] = t;
    jr["sup_rho"] = sup;
    jr["argmax_theta"] = arg;
    jr["samples_used"] = used;
    results.push_back(jr);
    std::printf("two-level t=%s: sup rho = %s at theta = %s (%d samples)\n",
                io::fmt_e(t, 3).c_str(), io::fmt_e(sup, 6).c_str(), io::fmt_e(arg, 6).c_str(),
                used);
  }
  art.write("two_level.csv", csv);
  write_manifest(art, opt, cfg, "lfa-two-level", results);
  return 0;
}

int run_lfa_three_level(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "t", "omega", "mu", "samples", "smoother", "exact_middle"});
  const std::vector<double> ts = cfg.num_list("t");
  const double omega = cfg.num_or("omega", 0.6), mu = cfg.num_or("mu", 0.5);
  const int samples = cfg.integer_or("samples", 1024);
  const bool exact_middle = cfg.flag_or("exact_middle", false);
  const lfa::Smoother sm = smoother_of(cfg);

  std::string csv = "t,theta,rho\n";
  json results = json::array();
  for (double t : ts)
  {
    const lfa::Stencil mid = lfa::stencil_condensed(2.0 * t);
    const lfa::Stencil coarse = lfa::stencil_condensed(4.0 * t);
    double sup = 0.0, arg = 0.0;
    int used = 0;
    for (int j = 0; j < samples; j++)
    {
      const double th = -kPi / 2.0 + (j + 0.5) * kPi / samples;
      if (std::abs(lfa::symbol(coarse, 2.0 * th)) < kResTol ||
          std::abs(lfa::symbol(mid, th)) < kResTol ||
          std::abs(lfa::symbol(mid, alias_freq(th))) < kResTol)
        continue;
      const double r =
          spectral_radius(lfa::three_level_matrix(t, th, omega, mu, sm, exact_middle));
      used++;
      if (r > sup)
      {
        sup = r;
        arg = th;
      }
      csv += io::fmt_e(t, 6) + "," + io::fmt_e(th) + "," + io::fmt_e(r) + "\n";
    }
    json jr;
    jr["t"] = t;
    jr["sup_rho"] = sup;
    jr["argmax_theta"] = arg;
    jr["samples_used"] = used;
    results.push_back(jr);
    std::printf("three-level t=%s: sup rho = %s at theta = %s (%d samples)\n",
                io::fmt_e(t, 3).c_str(), io::fmt_e(sup, 6).c_str(), io::fmt_e(arg, 6).c_str(),
                used);
  }
  art.write("three_level.csv", csv);
  write_manifest(art, opt, cfg, "lfa-three-level", results);
  return 0;
}

int run_lfa_smoother(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "t", "omega", "samples"});
  const std::vector<double> ts = cfg.num_list("t");
  const double omega = cfg.num_or("omega", 0.6);
  const int samples = cfg.integer_or("samples", 1024);

  std::string csv = "t,theta,jacobi,gs\n";
  json results = json::array();
  for (double t : ts)
  {
    const lfa::Stencil st = lfa::stencil_condensed(t);
    double sup_j = 0.0, sup_g = 0.0;
    for (int j = 0; j < samples; j++)
    {
      const double th = -kPi + (j + 0.5) * 2.0 * kPi / samples;
      if (std::abs(st.s1 * std::exp(cplx(0.0, -th)) + st.s0) < kResTol)
        continue;
      const double rj = std::abs(lfa::jacobi_symbol(st, omega, th));
      const double rg = std::abs(lfa::gs_symbol(st, th));
      sup_j = std::max(sup_j, rj);
      sup_g = std::max(sup_g, rg);
      csv += io::fmt_e(t, 6) + "," + io::fmt_e(th) + "," + io::fmt_e(rj) + "," +
             io::fmt_e(rg) + "\n";
    }
    json jr;
    jr["t"] = t;
    jr["sup_jacobi"] = sup_j;
    jr["sup_gs"] = sup_g;
    results.push_back(jr);
    std::printf("smoother t=%s: sup |jacobi| = %s, sup |gs| = %s\n", io::fmt_e(t, 3).c_str(),
                io::fmt_e(sup_j, 6).c_str(), io::fmt_e(sup_g, 6).c_str());
  }
  art.write("smoother.csv", csv);
  write_manifest(art, opt, cfg, "lfa-smoother", results);
  return 0;
}

int run_lfa_gmres(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "kappa", "h", "omega", "freqs", "residual_norm"});
  const double kappa = cfg.num_or("kappa", 200.0);
  const double h = cfg.num_or("h", 0.005);
  const double omega = cfg.num_or("omega", 0.6);
  const int freqs = cfg.integer_or("freqs", 256);
  const bool residual_norm = cfg.flag_or("residual_norm", false);

  const lfa::AmplificationResult r =
      lfa::gmres_amplification_experiment(kappa, h, omega, freqs, residual_norm);

  std::string csv = "theta,rho_jacobi,rho_gs,rho_gmres\n";
  for (size_t i = 0; i < r.theta.size(); i++)
    csv += io::fmt_e(r.theta[i]) + "," + io::fmt_e(r.rho_jacobi[i]) + "," +
           io::fmt_e(r.rho_gs[i]) + "," + io::fmt_e(r.rho_gmres[i]) + "\n";
  art.write("gmres_experiment.csv", csv);

  json results;
  results["kappa"] = kappa;
  results["h"] = h;
  results["frac_gmres_le_both"] = r.frac_gmres_le_both;
  results["max_jacobi"] = r.max_jacobi;
  results["max_gs"] = r.max_gs;
  results["max_gmres"] = r.max_gmres;
  std::printf("gmres(1) best for %s of %zu modes; max rho: jacobi %s, gs %s, gmres %s\n",
              io::fmt_f(100.0 * r.frac_gmres_le_both, 1).c_str(), r.theta.size(),
              io::fmt_f(r.max_jacobi, 3).c_str(), io::fmt_f(r.max_gs, 3).c_str(),
              io::fmt_f(r.max_gmres, 3).c_str());
  write_manifest(art, opt, cfg, "lfa-gmres-experiment", results);
  return 0;
}

// ------------------------------------------------------------ stability mode

int run_stability(const Config &cfg, const RunOptions &opt, Artifacts &art)
{
  cfg.check_allowed({"mode", "p", "n", "c"});
  const std::vector<int> ps = cfg.int_list_or("p", {1, 2});
  const std::vector<int> ns = cfg.int_list_or("n", {4, 8});
  const double c = cfg.num_or("c", 1.0);

  std::string csv = "p,n_coarse,n_fine,lambda\n";
  json results = json::array();
  for (int p : ps)
  {
    if (p < 1 || p > 4)
      fail_key(cfg, "p", "degrees must be between 1 and 4");
    for (int n : ns)
    {
      if (n < 2)
        fail_key(cfg, "n", "mesh sizes must be >= 2");
      MeshHierarchy2D hier = build_hierarchy_2d(n, 2);
      PoissonAssembler coarse(hier.meshes[0], p, c);
      PoissonAssembler fine(hier.meshes[1], p, c);
      std::vector<CsrD> P = build_transfer_zero_bc(hier, {&coarse, &fine});
      const double lam = energy_stability_ratio(coarse, fine, P[0]);
      csv += std::to_string(p) + "," + std::to_string(n) + "," + std::to_string(2 * n) + "," +
             io::fmt_e(lam) + "\n";
      json jr;
      jr["p"] = p;
      jr["n_coarse"] = n;
      jr["n_fine"] = 2 * n;
      jr["lambda"] = lam;
      results.push_back(jr);
      std::printf("stability p=%d n=%d->%d: lambda = %s\n", p, n, 2 * n,
                  io::fmt_e(lam, 6).c_str());
    }
  }
  art.write("stability.csv", csv);
  write_manifest(art, opt, cfg, "stability-check", results);
  return 0;
}

}  // namespace

int auto_n0(double kappa, int p)
{
  const double target = kappa * std::sqrt(2.0) / (2.0 * p);
  int e = static_cast<int>(std::lround(std::log2(std::max(target, 2.0))));
  if (e < 1)
    e = 1;
  return 1 << e;
}

std::string mode_family(const std::string &mode)
{
  if (mode == "solve")
    return "solve";
  if (mode.rfind("lfa-", 0) == 0)
    return "lfa";
  if (mode == "stability-check")
    return "stability";
  return "";
}

int run(const RunOptions &opt)
{
  const Config cfg = Config::from_file(opt.config_path);
  const std::string mode = cfg.str("mode");

  Artifacts art;
  art.dir = opt.out_dir;
  std::error_code ec;
  fs::create_directories(art.dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + opt.out_dir + "': " + ec.message());

  if (mode == "solve")
    return run_solve(cfg, opt, art);
  if (mode == "lfa-two-level")
    return run_lfa_two_level(cfg, opt, art);
  if (mode == "lfa-three-level")
    return run_lfa_three_level(cfg, opt, art);
  if (mode == "lfa-smoother")
    return run_lfa_smoother(cfg, opt, art);
  if (mode == "lfa-gmres-experiment")
    return run_lfa_gmres(cfg, opt, art);
  if (mode == "stability-check")
    return run_stability(cfg, opt, art);
  fail_key(cfg, "mode",
           "expected one of solve, lfa-two-level, lfa-three-level, lfa-smoother, "
           "lfa-gmres-experiment, stability-check; got '" +
               mode + "'");
}

}  // namespace hdgmg
