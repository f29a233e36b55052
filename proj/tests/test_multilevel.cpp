// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "hdgmg/hdg.hpp"
#include "hdgmg/mesh.hpp"
#include "hdgmg/multilevel.hpp"
#include "hdgmg/problems.hpp"
#include "hdgmg/transfer.hpp"

using namespace hdgmg;

namespace
{

std::mt19937 rng(4242);

VecZ random_vec(int64 n)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VecZ v(static_cast<std::size_t>(n));
  for (cplx &z : v)
    z = cplx(d(rng), d(rng));
  return v;
}

struct Stack
{
  std::vector<SkeletonSystem> sys;
  std::vector<CsrZ> P;
  std::vector<double> ratios;
};

Stack make_stack(double kappa, int p, int n0, int levels)
{
  Stack st;
  SecondOrderProblem second = bessel_example(kappa);
  HelmholtzProblem prob = to_mixed_form(second, p, -0.5, -0.5, 1.0);
  MeshHierarchy2D hier = build_hierarchy_2d(n0, levels, -0.5, -0.5, 1.0);
  std::vector<std::unique_ptr<HelmholtzAssembler>> asmb;
  for (const Mesh2D &m : hier.meshes)
    asmb.push_back(std::make_unique<HelmholtzAssembler>(m, prob));
  std::vector<const HelmholtzAssembler *> ptrs;
  for (auto &a : asmb)
    ptrs.push_back(a.get());
  st.P = build_transfer(hier, ptrs);
  for (auto &a : asmb)
    st.sys.push_back(a->assemble());
  st.ratios = switch_ratios(st.sys, kappa, 1.0);
  return st;
}

Eigen::MatrixXcd dense_of(const CsrZ &A)
{
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(A.n_rows, A.n_cols);
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      M(r, A.col[k]) += A.val[k];
  return M;
}

Eigen::MatrixXcd dense_mass(const SkeletonSystem &sys)
{
  const int64 n = sys.n_dofs;
  Eigen::MatrixXcd M(n, n);
  VecZ e(static_cast<std::size_t>(n), cplx(0, 0)), y(static_cast<std::size_t>(n));
  for (int64 j = 0; j < n; j++)
  {
    e[static_cast<std::size_t>(j)] = 1.0;
    sys.apply_mass(e.data(), y.data());
    for (int64 i = 0; i < n; i++)
      M(i, j) = y[static_cast<std::size_t>(i)];
    e[static_cast<std::size_t>(j)] = 0.0;
  }
  return M;
}

Eigen::VectorXcd to_eigen(const VecZ &v)
{
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<int64>(v.size()));
}

VecZ from_eigen(const Eigen::VectorXcd &v)
{
  return VecZ(v.data(), v.data() + v.size());
}

// Affine weighted-Jacobi solve operator: the map c -> x after `sweeps` sweeps
// of x += omega D^-1 (c - A x) started from zero.
Eigen::MatrixXcd jacobi_solve_op(const Eigen::MatrixXcd &A, const VecZ &diag, double omega,
                                 int sweeps)
{
  const int64 n = A.rows();
  Eigen::MatrixXcd Dinv = Eigen::MatrixXcd::Zero(n, n);
  for (int64 i = 0; i < n; i++)
    Dinv(i, i) = 1.0 / diag[static_cast<std::size_t>(i)];
  const Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n) - omega * Dinv * A;
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd Gp = Eigen::MatrixXcd::Identity(n, n);
  for (int s = 0; s < sweeps; s++)
  {
    W += Gp * (omega * Dinv);
    Gp = G * Gp;
  }
  return W;
}

}  // namespace

TEST_CASE("switch ratios follow kappa * h_T / p")
{
  Stack st = make_stack(20.0, 2, 4, 3);
  REQUIRE(st.ratios.size() == 3);
  for (int l = 0; l < 3; l++)
  {
    const double n = 4.0 * std::pow(2.0, l);
    CHECK(st.ratios[static_cast<std::size_t>(l)] ==
          doctest::Approx(20.0 * std::sqrt(2.0) / (n * 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("exact solution is a fixed point of the cycle")
{
  Stack st = make_stack(20.0, 1, 8, 2);
  CyclePlan plan;  // level 1 ratio = 20 sqrt(2)/16 = 1.77 -> GMRES smoothing
  Multilevel ml(st.sys, st.P, plan, st.ratios);
  VecZ x = random_vec(st.sys.back().n_dofs);
  VecZ b(x.size());
  ml.apply_fine(x.data(), b.data());
  VecZ v = x;
  ml.cycle(b, v);
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    dev = std::max(dev, std::abs(v[i] - x[i]));
    scale = std::max(scale, std::abs(x[i]));
  }
  CHECK(dev < 1e-12 * scale);
}

TEST_CASE("single level with mu = 1 solves exactly in one cycle / one outer iteration")
{
  Stack st = make_stack(20.0, 1, 8, 1);
  CyclePlan plan;
  plan.mu = 1.0;
  Multilevel ml(st.sys, st.P, plan, st.ratios);
  const SkeletonSystem &sys = st.sys[0];

  VecZ x = random_vec(sys.n_dofs);
  VecZ b(x.size());
  ml.apply_fine(x.data(), b.data());
  VecZ v(x.size(), cplx(0, 0));
  ml.cycle(b, v);
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    dev = std::max(dev, std::abs(v[i] - x[i]));
    scale = std::max(scale, std::abs(x[i]));
  }
  CHECK(dev < 1e-10 * scale);

  GmresResult res = ml.solve(b, 1e-10, 10);
  CHECK(res.converged);
  CHECK(res.iters == 1);
  CHECK(res.true_relres < 1e-10);
}

TEST_CASE("cycle error propagation matches the dense operator product (all-relaxation)")
{
  // All levels on the relaxation branch: the cycle is an affine-linear fixed
  // operator, so its error propagator factors as the schedule-ordered product
  // of I - mu I_l W_l Q_l A, built here densely from first principles.
  Stack st = make_stack(2.0, 1, 1, 2);  // dims 10 and 32
  CyclePlan plan;
  plan.relax = CyclePlan::Relax::jacobi;
  plan.omega = 0.6;
  plan.mu = 0.5;
  plan.m2 = 2;  // first-leg sweeps
  plan.m3 = 1;  // second-leg sweeps (deliberately different)
  std::vector<double> forced = {0.0, 0.0};  // ratio < alpha: relaxation everywhere
  Multilevel ml(st.sys, st.P, plan, forced);

  const int64 nf = st.sys[1].n_dofs, nc = st.sys[0].n_dofs;
  const Eigen::MatrixXcd A = dense_of(st.sys[1].A);
  const Eigen::MatrixXcd A0 = dense_of(st.sys[0].A);
  const Eigen::MatrixXcd P0 = dense_of(st.P[0]);
  const Eigen::MatrixXcd Mf = dense_mass(st.sys[1]);
  const Eigen::MatrixXcd Mc = dense_mass(st.sys[0]);
  const Eigen::MatrixXcd Q0 = Mc.lu().solve(P0.adjoint() * Mf);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(nf, nf);

  const Eigen::MatrixXcd C0 = P0 * A0.lu().solve(Q0);          // coarse exact correction
  const Eigen::MatrixXcd W2 = jacobi_solve_op(A, st.sys[1].diag, 0.6, plan.m2);
  const Eigen::MatrixXcd W1 = jacobi_solve_op(A, st.sys[1].diag, 0.6, plan.m3);
  const Eigen::MatrixXcd T0 = I - plan.mu * C0 * A;
  const Eigen::MatrixXcd T1a = I - plan.mu * W2 * A;  // fine visit, first leg
  const Eigen::MatrixXcd T1b = I - plan.mu * W1 * A;  // fine visit, second leg
  // Schedule (0,leg0), (1,leg0), (1,leg1), (0,leg1): last applied leftmost.
  const Eigen::MatrixXcd E = T0 * T1b * T1a * T0;

  double worst = 0.0;
  for (int trial = 0; trial < 3; trial++)
  {
    VecZ xs = random_vec(nf);
    VecZ b(xs.size());
    ml.apply_fine(xs.data(), b.data());
    VecZ v = random_vec(nf);
    const Eigen::VectorXcd e_in = to_eigen(v) - to_eigen(xs);
    ml.cycle(b, v);
    const Eigen::VectorXcd e_out = to_eigen(v) - to_eigen(xs);
    worst = std::max(worst, (e_out - E * e_in).cwiseAbs().maxCoeff() / e_in.cwiseAbs().maxCoeff());
  }
  CHECK(nc == 10);
  CHECK(nf == 32);
  CHECK(worst < 1e-10);
}

TEST_CASE("stepwise GMRES smoothing applies the single-step least-squares correction")
{
  // Force GMRES smoothing on the fine level with one step per visit; each
  // visit must add mu * gamma * c where c is the fresh residual and gamma the
  // 1-d least-squares coefficient of GMRES(1) from zero.
  Stack st = make_stack(2.0, 1, 1, 2);
  CyclePlan plan;
  plan.mu = 0.7;
  plan.m1 = 1;
  plan.m4 = 1;
  plan.gmres_style = CyclePlan::GmresStyle::stepwise;
  std::vector<double> forced = {0.0, 99.0};  // fine level on the GMRES branch
  Multilevel ml(st.sys, st.P, plan, forced);

  const Eigen::MatrixXcd A = dense_of(st.sys[1].A);
  const Eigen::MatrixXcd A0 = dense_of(st.sys[0].A);
  const Eigen::MatrixXcd P0 = dense_of(st.P[0]);
  const Eigen::MatrixXcd Mf = dense_mass(st.sys[1]);
  const Eigen::MatrixXcd Mc = dense_mass(st.sys[0]);
  const Eigen::MatrixXcd Q0 = Mc.lu().solve(P0.adjoint() * Mf);

  VecZ xs = random_vec(st.sys[1].n_dofs);
  VecZ b(xs.size());
  ml.apply_fine(xs.data(), b.data());
  VecZ v0 = random_vec(st.sys[1].n_dofs);

  // Replay the cycle densely.
  Eigen::VectorXcd v = to_eigen(v0);
  const Eigen::VectorXcd be = to_eigen(b);
  auto coarse_corr = [&]() {
    const Eigen::VectorXcd c = Q0 * (be - A * v);
    v += plan.mu * (P0 * A0.lu().solve(c));
  };
  auto gmres1_corr = [&]() {
    const Eigen::VectorXcd c = be - A * v;  // Q_L = identity on the finest level
    const Eigen::VectorXcd d = A * c;
    const cplx gamma = d.dot(c) / d.dot(d);  // Eigen dot conjugates the left factor
    v += plan.mu * (gamma * c);
  };
  coarse_corr();
  gmres1_corr();
  gmres1_corr();
  coarse_corr();

  VecZ got = v0;
  ml.cycle(b, got);
  const double scale = v.cwiseAbs().maxCoeff();
  CHECK((to_eigen(got) - v).cwiseAbs().maxCoeff() < 1e-11 * scale);
}

TEST_CASE("recursive source runs a classical V-cycle")
{
  Stack st = make_stack(2.0, 1, 1, 2);
  CyclePlan plan;
  plan.relax = CyclePlan::Relax::jacobi;
  plan.omega = 0.6;
  plan.mu = 0.5;
  plan.m2 = 2;
  plan.m3 = 1;
  plan.source = CyclePlan::Source::recursive;
  std::vector<double> forced = {0.0, 0.0};
  Multilevel ml(st.sys, st.P, plan, forced);

  const int64 nf = st.sys[1].n_dofs;
  const Eigen::MatrixXcd A = dense_of(st.sys[1].A);
  const Eigen::MatrixXcd A0 = dense_of(st.sys[0].A);
  const Eigen::MatrixXcd P0 = dense_of(st.P[0]);
  const Eigen::MatrixXcd Mf = dense_mass(st.sys[1]);
  const Eigen::MatrixXcd Mc = dense_mass(st.sys[0]);
  const Eigen::MatrixXcd Q0 = Mc.lu().solve(P0.adjoint() * Mf);
  Eigen::MatrixXcd Dinv = Eigen::MatrixXcd::Zero(nf, nf);
  for (int64 i = 0; i < nf; i++)
    Dinv(i, i) = 1.0 / st.sys[1].diag[static_cast<std::size_t>(i)];
  const Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(nf, nf) - 0.6 * Dinv * A;
  const Eigen::MatrixXcd Wpre = jacobi_solve_op(A, st.sys[1].diag, 0.6, plan.m2);
  const Eigen::MatrixXcd Wpost = jacobi_solve_op(A, st.sys[1].diag, 0.6, plan.m3);

  VecZ xs = random_vec(nf);
  VecZ b(xs.size());
  ml.apply_fine(xs.data(), b.data());
  VecZ v0 = random_vec(nf);

  // V-cycle on the residual equation A w = c, c = b - A v0.
  const Eigen::VectorXcd c = to_eigen(b) - A * to_eigen(v0);
  Eigen::VectorXcd w = Wpre * c;                                  // pre-smooth from zero
  w += plan.mu * (P0 * A0.lu().solve(Q0 * (c - A * w)));          // damped coarse correction
  w = G * w + Wpost * c;                                          // warm-started post-smooth
  const Eigen::VectorXcd expect = to_eigen(v0) + w;               // undamped top-level add

  VecZ got = v0;
  ml.cycle(b, got);
  CHECK((to_eigen(got) - expect).cwiseAbs().maxCoeff() < 1e-11 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("outer solves converge for every cycle variant")
{
  Stack st = make_stack(20.0, 1, 8, 2);
  const SkeletonSystem &fine = st.sys.back();
  const VecZ b = fine.F;

  auto run = [&](CyclePlan plan, bool left) {
    Multilevel ml(st.sys, st.P, plan, st.ratios);
    return ml.solve(b, 1e-6, 60, left);
  };

  CyclePlan stepwise;  // defaults
  CyclePlan batch;
  batch.gmres_style = CyclePlan::GmresStyle::batch;
  CyclePlan recursive;
  recursive.source = CyclePlan::Source::recursive;
  CyclePlan jac;
  jac.relax = CyclePlan::Relax::jacobi;

  for (const CyclePlan &plan : {stepwise, batch, recursive, jac})
  {
    GmresResult res = run(plan, true);
    CHECK(res.converged);
    CHECK(res.history.back() <= 1e-6);
    // Left-preconditioned recurrence residuals are non-increasing.
    for (std::size_t i = 1; i < res.history.size(); i++)
      CHECK(res.history[i] <= res.history[i - 1] + 1e-14);
  }

  // Flexible right preconditioning stops on the true residual.
  GmresResult fres = run(stepwise, false);
  CHECK(fres.converged);
  CHECK(fres.true_relres <= 1e-6);
}

TEST_CASE("non-finite data is rejected with the offending level")
{
  Stack st = make_stack(20.0, 1, 8, 2);
  CyclePlan plan;
  Multilevel ml(st.sys, st.P, plan, st.ratios);
  VecZ b(static_cast<std::size_t>(st.sys.back().n_dofs), cplx(1.0, 0.0));
  VecZ v(b.size(), cplx(0.0, 0.0));
  v[3] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_WITH_AS(ml.cycle(b, v), doctest::Contains("level"), std::runtime_error);
}

TEST_CASE("hierarchy consistency is validated at construction")
{
  Stack st = make_stack(20.0, 1, 8, 2);
  CyclePlan plan;
  std::vector<double> bad_ratios = {1.0};  // wrong length
  CHECK_THROWS_AS(Multilevel(st.sys, st.P, plan, bad_ratios), std::invalid_argument);
  std::vector<CsrZ> bad_P;  // missing prolongation
  CHECK_THROWS_AS(Multilevel(st.sys, bad_P, plan, st.ratios), std::invalid_argument);
}
