// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_SOLVERS_HPP
#define HDGMG_SOLVERS_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <vector>

#include "hdgmg/types.hpp"

namespace hdgmg
{

// Matrix-free complex linear operator.
struct LinOpZ
{
  int64 n = 0;
  std::function<void(const cplx *, cplx *)> apply;
};

struct GmresOptions
{
  int max_iter = 200;
  double tol = 1e-6;  // relative residual target; 0 runs exactly max_iter steps
  // Optional preconditioner.  With flexible = false it acts on the left
  // (residual history is then the preconditioned residual); with
  // flexible = true it is applied on the right to each basis vector and may
  // vary between iterations (FGMRES).
  std::function<void(const cplx *, cplx *)> prec;
  bool flexible = false;
  bool record_history = true;
};

struct GmresResult
{
  VecZ x;
  std::vector<double> history;  // recurrence relative residuals, history[0] = 1 scale
  int iters = 0;
  bool converged = false;
  double true_relres = 0.0;  // ||b - A x|| / ||b|| at the returned iterate
};

GmresResult gmres_solve(const LinOpZ &A, const VecZ &b, const VecZ *x0,
                        const GmresOptions &opt);

// One damped Jacobi sweep x += omega * D^-1 (b - A x); scratch holds A x.
void weighted_jacobi_sweep(const CsrZ &A, const VecZ &diag, double omega, const VecZ &b,
                           VecZ &x, VecZ &scratch);

// One forward Gauss-Seidel sweep in natural dof order (rows must be sorted by
// column, as produced by TripletBuffer::compress).
void gauss_seidel_sweep(const CsrZ &A, const VecZ &b, VecZ &x);

// Sparse LU wrapper used on the coarsest level and in oracles.
class DirectSolverZ
{
public:
  explicit DirectSolverZ(const CsrZ &A);
  void solve(const cplx *b, cplx *x) const;
  int64 n() const { return n_; }

private:
  int64 n_;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu_;
};

}  // namespace hdgmg

#endif  // HDGMG_SOLVERS_HPP
