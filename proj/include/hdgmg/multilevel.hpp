// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_MULTILEVEL_HPP
#define HDGMG_MULTILEVEL_HPP

#include <memory>
#include <vector>

#include "hdgmg/hdg.hpp"
#include "hdgmg/solvers.hpp"
#include "hdgmg/types.hpp"

namespace hdgmg
{

// Parameters of one multilevel cycle.  Every intermediate level applies its
// correction to the current finest iterate, damped by mu; a level smooths the
// restricted equation with a few GMRES steps while its mesh is coarse
// relative to the wave number (kappa h_T / p >= alpha) and with plain
// relaxation sweeps once the mesh resolves the wave.
struct CyclePlan
{
  double alpha = 0.5;  // smoother switch threshold on kappa h_T / p
  double mu = 0.5;     // damping of every level correction
  int m1 = 2;          // GMRES steps, first leg
  int m2 = 2;          // relaxation sweeps, first leg
  int m3 = 2;          // relaxation sweeps, second leg
  int m4 = 2;          // GMRES steps, second leg

  enum class Relax
  {
    gs,
    jacobi
  };
  Relax relax = Relax::gs;
  double omega = 0.6;  // Jacobi weight

  // How the m GMRES smoothing steps of one level visit are spent.  "stepwise"
  // performs m damped single-step corrections, refreshing the finest residual
  // before each restriction; "batch" restricts once and runs one m-step GMRES
  // solve on that fixed right-hand side.
  enum class GmresStyle
  {
    stepwise,
    batch
  };
  GmresStyle gmres_style = GmresStyle::stepwise;

  // Where each level correction takes its residual from.  "finest" restricts
  // the current finest-level residual straight down (the method as designed);
  // "recursive" replaces the schedule by a classical V-cycle that restricts
  // residuals level to level.
  enum class Source
  {
    finest,
    recursive
  };
  Source source = Source::finest;
};

// Multilevel preconditioner: hierarchy of condensed skeleton systems tied
// together by the averaging-based prolongations P[l] : level l -> l+1.
class Multilevel
{
public:
  // switch_ratio[l] = kappa h_T / p on level l (see switch_ratios below).
  Multilevel(std::vector<SkeletonSystem> systems, std::vector<CsrZ> prolongation,
             CyclePlan plan, std::vector<double> switch_ratio);

  int L() const { return static_cast<int>(systems_.size()) - 1; }
  const SkeletonSystem &level(int l) const { return systems_[static_cast<size_t>(l)]; }
  const CyclePlan &plan() const { return plan_; }
  // kappa h_T / p of level l (decides the smoother on that level).
  double switch_ratio(int l) const { return switch_ratio_[static_cast<size_t>(l)]; }

  void apply_fine(const cplx *x, cplx *y) const;  // y = A_L x

  // One full cycle updating v in place (levels 0, 1..L, L..1, 0).
  void cycle(const VecZ &b, VecZ &v) const;
  // Preconditioner application: one cycle from a zero initial guess.
  VecZ precondition(const VecZ &r) const;

  // Outer Krylov solve of A_L x = b with the cycle as preconditioner.  The
  // default is left preconditioning with the stop test on the recurrence
  // residual scaled by the initial preconditioned residual; because the cycle
  // contains inner GMRES smoothing it is not a fixed linear operator, so the
  // recurrence residual can drift from the truth — GmresResult::true_relres
  // always reports the honest unpreconditioned value.  left_prec = false
  // switches to flexible right preconditioning with a true-residual stop.
  GmresResult solve(const VecZ &b, double tol, int max_iter, bool left_prec = true) const;

private:
  void add_correction(int l, int leg, const VecZ &b, VecZ &v) const;
  void vcycle(int l, const VecZ &c, VecZ &w) const;  // recursive-source variant
  VecZ restricted_residual(int l, const VecZ &b, const VecZ &v) const;
  VecZ restrict_to(int l, const VecZ &r_fine) const;  // Q_l applied to a fine vector
  VecZ restrict_one(int l, const VecZ &r) const;      // level l+1 -> l
  void prolong_add(int l, const VecZ &w, VecZ &v) const;

  std::vector<SkeletonSystem> systems_;
  std::vector<CsrZ> P_;  // P_[l] : level l -> l+1
  CyclePlan plan_;
  std::vector<double> switch_ratio_;
  std::unique_ptr<DirectSolverZ> coarse_;  // factorization of Ahat on level 0
};

// Convenience: switch ratios kappa h_T / p for a hierarchy (h_T = element
// diameter = sqrt(2) * extent / n).
std::vector<double> switch_ratios(const std::vector<SkeletonSystem> &systems, double kappa,
                                  double extent);

}  // namespace hdgmg

#endif  // HDGMG_MULTILEVEL_HPP
