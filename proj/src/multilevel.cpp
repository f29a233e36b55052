// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/multilevel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hdgmg/kernels.hpp"
#include "hdgmg/transfer.hpp"

namespace hdgmg
{

Multilevel::Multilevel(std::vector<SkeletonSystem> systems, std::vector<CsrZ> prolongation,
                       CyclePlan plan, std::vector<double> switch_ratio)
  : systems_(std::move(systems)), P_(std::move(prolongation)), plan_(plan),
    switch_ratio_(std::move(switch_ratio))
{
  if (P_.size() + 1 != systems_.size() || switch_ratio_.size() != systems_.size())
    throw std::invalid_argument("Multilevel: inconsistent hierarchy sizes");
  for (size_t l = 0; l + 1 < systems_.size(); l++)
    if (P_[l].n_rows != systems_[l + 1].n_dofs || P_[l].n_cols != systems_[l].n_dofs)
      throw std::invalid_argument("Multilevel: prolongation dimensions mismatch");
  coarse_ = std::make_unique<DirectSolverZ>(systems_[0].Ahat);
}

void Multilevel::apply_fine(const cplx *x, cplx *y) const
{
  kernels::spmv_z(systems_.back().A, x, y);
}

VecZ Multilevel::restrict_to(int l, const VecZ &r_fine) const
{
  // Q_l = M_l^-1 I_l^H M_L with I_l the composed prolongation to level L.
  const SkeletonSystem &fine = systems_.back();
  if (l == L())
    return r_fine;
  VecZ w(r_fine.size());
  fine.apply_mass(r_fine.data(), w.data());
  for (int j = L() - 1; j >= l; j--)
  {
    VecZ next(systems_[static_cast<size_t>(j)].n_dofs);
    csr_apply_adjoint(P_[static_cast<size_t>(j)], w.data(), next.data());
    w = std::move(next);
  }
  VecZ out(w.size());
  systems_[static_cast<size_t>(l)].solve_mass(w.data(), out.data());
  return out;
}

void Multilevel::prolong_add(int l, const VecZ &w, VecZ &v) const
{
  if (l == L())
  {
    kernels::zaxpy(v.size(), cplx(plan_.mu, 0.0), w.data(), v.data());
    return;
  }
  VecZ cur = w;
  for (int j = l; j < L(); j++)
  {
    VecZ next(systems_[static_cast<size_t>(j) + 1].n_dofs);
    csr_apply(P_[static_cast<size_t>(j)], cur.data(), next.data());
    cur = std::move(next);
  }
  kernels::zaxpy(v.size(), cplx(plan_.mu, 0.0), cur.data(), v.data());
}

namespace
{

void check_finite(int l, const VecZ &w)
{
  for (const cplx &z : w)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::runtime_error("multilevel cycle: non-finite correction at level " +
                               std::to_string(l));
}

}  // namespace

VecZ Multilevel::restricted_residual(int l, const VecZ &b, const VecZ &v) const
{
  const SkeletonSystem &fine = systems_.back();
  VecZ r(fine.n_dofs);
  kernels::spmv_z(fine.A, v.data(), r.data());
  for (int64 i = 0; i < fine.n_dofs; i++)
    r[i] = b[i] - r[i];
  return restrict_to(l, r);
}

VecZ Multilevel::restrict_one(int l, const VecZ &r) const
{
  // Q from level l+1 to level l: M_l^-1 P_l^H M_{l+1}.
  const SkeletonSystem &up = systems_[static_cast<size_t>(l) + 1];
  VecZ t(up.n_dofs);
  up.apply_mass(r.data(), t.data());
  VecZ s(systems_[static_cast<size_t>(l)].n_dofs);
  csr_apply_adjoint(P_[static_cast<size_t>(l)], t.data(), s.data());
  VecZ out(s.size());
  systems_[static_cast<size_t>(l)].solve_mass(s.data(), out.data());
  return out;
}

void Multilevel::add_correction(int l, int leg, const VecZ &b, VecZ &v) const
{
  const SkeletonSystem &sys = systems_[static_cast<size_t>(l)];
  const bool gmres_level = l > 0 && switch_ratio_[static_cast<size_t>(l)] >= plan_.alpha;

  if (gmres_level && plan_.gmres_style == CyclePlan::GmresStyle::stepwise)
  {
    // m damped single-step corrections, each from a freshly restricted
    // finest residual.
    const int steps = leg == 0 ? plan_.m1 : plan_.m4;
    LinOpZ op{sys.n_dofs, [&sys](const cplx *x, cplx *y) { kernels::spmv_z(sys.A, x, y); }};
    GmresOptions opt;
    opt.max_iter = 1;
    opt.tol = 0.0;
    opt.record_history = false;
    for (int s = 0; s < steps; s++)
    {
      VecZ c = restricted_residual(l, b, v);
      VecZ w = gmres_solve(op, c, nullptr, opt).x;
      check_finite(l, w);
      prolong_add(l, w, v);
    }
    return;
  }

  // Residual of the current finest iterate, restricted to level l.
  VecZ c = restricted_residual(l, b, v);

  VecZ w(sys.n_dofs, cplx(0.0, 0.0));
  if (l == 0)
  {
    // Exact solve: A_0 w = c <=> Ahat_0 w = M_0 c.
    VecZ rhs(sys.n_dofs);
    sys.apply_mass(c.data(), rhs.data());
    coarse_->solve(rhs.data(), w.data());
  }
  else if (gmres_level)
  {
    const int steps = leg == 0 ? plan_.m1 : plan_.m4;
    LinOpZ op{sys.n_dofs, [&sys](const cplx *x, cplx *y) { kernels::spmv_z(sys.A, x, y); }};
    GmresOptions opt;
    opt.max_iter = steps;
    opt.tol = 0.0;
    opt.record_history = false;
    w = gmres_solve(op, c, nullptr, opt).x;
  }
  else
  {
    const int sweeps = leg == 0 ? plan_.m2 : plan_.m3;
    VecZ scratch(sys.n_dofs);
    for (int s = 0; s < sweeps; s++)
    {
      if (plan_.relax == CyclePlan::Relax::gs)
        gauss_seidel_sweep(sys.A, c, w);
      else
        weighted_jacobi_sweep(sys.A, sys.diag, plan_.omega, c, w, scratch);
    }
  }
  check_finite(l, w);
  prolong_add(l, w, v);
}

void Multilevel::vcycle(int l, const VecZ &c, VecZ &w) const
{
  const SkeletonSystem &sys = systems_[static_cast<size_t>(l)];
  if (l == 0)
  {
    VecZ rhs(sys.n_dofs);
    sys.apply_mass(c.data(), rhs.data());
    coarse_->solve(rhs.data(), w.data());
    return;
  }

  LinOpZ op{sys.n_dofs, [&sys](const cplx *x, cplx *y) { kernels::spmv_z(sys.A, x, y); }};
  const bool gmres_level = switch_ratio_[static_cast<size_t>(l)] >= plan_.alpha;
  VecZ scratch(sys.n_dofs);
  auto smooth = [&](int gmres_steps, int relax_sweeps) {
    if (gmres_level)
    {
      GmresOptions opt;
      opt.max_iter = gmres_steps;
      opt.tol = 0.0;
      opt.record_history = false;
      w = gmres_solve(op, c, &w, opt).x;
    }
    else
    {
      for (int s = 0; s < relax_sweeps; s++)
      {
        if (plan_.relax == CyclePlan::Relax::gs)
          gauss_seidel_sweep(sys.A, c, w);
        else
          weighted_jacobi_sweep(sys.A, sys.diag, plan_.omega, c, w, scratch);
      }
    }
  };

  smooth(plan_.m1, plan_.m2);

  VecZ r(sys.n_dofs);
  kernels::spmv_z(sys.A, w.data(), r.data());
  for (int64 i = 0; i < sys.n_dofs; i++)
    r[i] = c[i] - r[i];
  VecZ cw = restrict_one(l - 1, r);
  VecZ wc(systems_[static_cast<size_t>(l) - 1].n_dofs, cplx(0.0, 0.0));
  vcycle(l - 1, cw, wc);
  VecZ up(sys.n_dofs);
  csr_apply(P_[static_cast<size_t>(l) - 1], wc.data(), up.data());
  kernels::zaxpy(sys.n_dofs, cplx(plan_.mu, 0.0), up.data(), w.data());

  smooth(plan_.m4, plan_.m3);
  check_finite(l, w);
}

void Multilevel::cycle(const VecZ &b, VecZ &v) const
{
  if (plan_.source == CyclePlan::Source::recursive)
  {
    const SkeletonSystem &fine = systems_.back();
    VecZ r(fine.n_dofs);
    kernels::spmv_z(fine.A, v.data(), r.data());
    for (int64 i = 0; i < fine.n_dofs; i++)
      r[i] = b[i] - r[i];
    VecZ w(fine.n_dofs, cplx(0.0, 0.0));
    vcycle(L(), r, w);
    kernels::zaxpy(fine.n_dofs, cplx(1.0, 0.0), w.data(), v.data());
    return;
  }

  add_correction(0, 0, b, v);
  for (int l = 1; l <= L(); l++)
    add_correction(l, 0, b, v);
  for (int l = L(); l >= 1; l--)
    add_correction(l, 1, b, v);
  add_correction(0, 1, b, v);
}

VecZ Multilevel::precondition(const VecZ &r) const
{
  VecZ v(r.size(), cplx(0.0, 0.0));
  cycle(r, v);
  return v;
}

GmresResult Multilevel::solve(const VecZ &b, double tol, int max_iter, bool left_prec) const
{
  const SkeletonSystem &fine = systems_.back();
  LinOpZ op{fine.n_dofs,
            [this](const cplx *x, cplx *y) { this->apply_fine(x, y); }};
  GmresOptions opt;
  opt.max_iter = max_iter;
  opt.tol = tol;
  opt.flexible = !left_prec;
  opt.prec = [this, &fine](const cplx *r, cplx *z) {
    VecZ rv(r, r + fine.n_dofs);
    VecZ v = precondition(rv);
    std::copy(v.begin(), v.end(), z);
  };
  return gmres_solve(op, b, nullptr, opt);
}

std::vector<double> switch_ratios(const std::vector<SkeletonSystem> &systems, double kappa,
                                  double extent)
{
  std::vector<double> out;
  out.reserve(systems.size());
  for (const SkeletonSystem &sys : systems)
  {
    double hT = std::sqrt(2.0) * extent / sys.n;
    out.push_back(kappa * hT / sys.p);
  }
  return out;
}

}  // namespace hdgmg
