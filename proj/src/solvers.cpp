// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdgmg/kernels.hpp"

namespace hdgmg
{

namespace
{

double nrm2(const VecZ &v)
{
  return std::sqrt(kernels::znrm2sq(v.size(), v.data()));
}

}  // namespace

GmresResult gmres_solve(const LinOpZ &A, const VecZ &b, const VecZ *x0,
                        const GmresOptions &opt)
{
  const size_t n = b.size();
  if (A.n != static_cast<int64>(n))
    throw std::invalid_argument("gmres_solve: dimension mismatch");
  GmresResult res;
  res.x = x0 ? *x0 : VecZ(n, cplx(0.0, 0.0));

  VecZ r(n), tmp(n);
  A.apply(res.x.data(), tmp.data());
  for (size_t i = 0; i < n; i++)
    r[i] = b[i] - tmp[i];
  if (opt.prec && !opt.flexible)
  {
    tmp = r;
    opt.prec(tmp.data(), r.data());
  }
  double beta = nrm2(r);
  // Residual scale: preconditioned b for left preconditioning, plain b else.
  double bscale;
  if (opt.prec && !opt.flexible)
  {
    VecZ pb(n);
    opt.prec(b.data(), pb.data());
    bscale = nrm2(pb);
  }
  else
    bscale = nrm2(b);
  if (bscale == 0.0)
    bscale = 1.0;
  if (opt.record_history)
    res.history.push_back(beta / bscale);
  // An exactly zero residual leaves a trivial Krylov space; return the
  // iterate as is (also covers tol = 0 smoothing calls with a zero rhs).
  if (beta == 0.0 || (beta / bscale <= opt.tol && opt.tol > 0.0))
  {
    res.converged = true;
    A.apply(res.x.data(), tmp.data());
    for (size_t i = 0; i < n; i++)
      tmp[i] = b[i] - tmp[i];
    double bs = nrm2(b);
    res.true_relres = nrm2(tmp) / (bs == 0.0 ? 1.0 : bs);
    return res;
  }

  const int mmax = opt.max_iter;
  std::vector<VecZ> V;  // orthonormal basis
  std::vector<VecZ> Z;  // preconditioned basis (flexible only)
  V.reserve(mmax + 1);
  V.push_back(r);
  kernels::zscal(n, cplx(1.0 / beta, 0.0), V[0].data());

  std::vector<std::vector<cplx>> H;  // H[j] holds column j (j+2 entries)
  std::vector<cplx> cs(mmax), sn(mmax), g(mmax + 1, cplx(0.0, 0.0));
  g[0] = beta;
  int k = 0;
  bool happy = false;

  for (; k < mmax; k++)
  {
    VecZ w(n);
    if (opt.flexible && opt.prec)
    {
      Z.emplace_back(n);
      opt.prec(V[k].data(), Z.back().data());
      A.apply(Z.back().data(), w.data());
    }
    else
    {
      if (opt.prec)
      {
        A.apply(V[k].data(), tmp.data());
        opt.prec(tmp.data(), w.data());
      }
      else
        A.apply(V[k].data(), w.data());
    }

    // Modified Gram-Schmidt with a single DGKS re-pass on severe cancellation.
    std::vector<cplx> h(k + 2, cplx(0.0, 0.0));
    double before = nrm2(w);
    for (int j = 0; j <= k; j++)
    {
      cplx hij = kernels::zdotc(n, V[j].data(), w.data());
      h[j] = hij;
      kernels::zaxpy(n, -hij, V[j].data(), w.data());
    }
    double after = nrm2(w);
    if (after < before / std::sqrt(2.0))
    {
      for (int j = 0; j <= k; j++)
      {
        cplx c = kernels::zdotc(n, V[j].data(), w.data());
        h[j] += c;
        kernels::zaxpy(n, -c, V[j].data(), w.data());
      }
      after = nrm2(w);
    }
    h[k + 1] = after;

    // Apply previous Givens rotations to the new column.
    for (int j = 0; j < k; j++)
    {
      cplx t = cs[j] * h[j] + sn[j] * h[j + 1];
      h[j + 1] = -std::conj(sn[j]) * h[j] + cs[j] * h[j + 1];
      h[j] = t;
    }
    // New rotation eliminating h[k+1].
    double denom = std::sqrt(std::norm(h[k]) + std::norm(h[k + 1]));
    if (denom == 0.0)
    {
      cs[k] = 1.0;
      sn[k] = 0.0;
    }
    else
    {
      cs[k] = std::abs(h[k]) / denom;
      cplx phase = h[k] == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : h[k] / std::abs(h[k]);
      sn[k] = phase * std::conj(h[k + 1]) / denom;
      h[k] = phase * denom;
      h[k + 1] = 0.0;
    }
    g[k + 1] = -std::conj(sn[k]) * g[k];
    g[k] = cs[k] * g[k];
    H.push_back(std::move(h));

    double relres = std::abs(g[k + 1]) / bscale;
    if (opt.record_history)
      res.history.push_back(relres);

    if (after <= 1e-14 * beta)
    {
      happy = true;
      k++;
      break;
    }
    if (opt.tol > 0.0 && relres <= opt.tol)
    {
      k++;
      break;
    }
    V.emplace_back(std::move(w));
    kernels::zscal(n, cplx(1.0 / after, 0.0), V.back().data());
  }

  // Back substitution for the Hessenberg least squares solution.
  std::vector<cplx> y(k, cplx(0.0, 0.0));
  for (int i = k - 1; i >= 0; i--)
  {
    cplx acc = g[i];
    for (int j = i + 1; j < k; j++)
      acc -= H[j][i] * y[j];
    y[i] = acc / H[i][i];
  }
  for (int j = 0; j < k; j++)
  {
    const VecZ &basis = (opt.flexible && opt.prec) ? Z[j] : V[j];
    kernels::zaxpy(n, y[j], basis.data(), res.x.data());
  }

  res.iters = k;
  A.apply(res.x.data(), tmp.data());
  for (size_t i = 0; i < n; i++)
    tmp[i] = b[i] - tmp[i];
  double bs = nrm2(b);
  res.true_relres = nrm2(tmp) / (bs == 0.0 ? 1.0 : bs);
  double claimed = k > 0 ? std::abs(g[k]) / bscale : beta / bscale;
  res.converged = happy || (opt.tol > 0.0 && claimed <= opt.tol);
  return res;
}

void weighted_jacobi_sweep(const CsrZ &A, const VecZ &diag, double omega, const VecZ &b,
                           VecZ &x, VecZ &scratch)
{
  kernels::spmv_z(A, x.data(), scratch.data());
  for (int64 i = 0; i < A.n_rows; i++)
    x[i] += omega * (b[i] - scratch[i]) / diag[i];
}

void gauss_seidel_sweep(const CsrZ &A, const VecZ &b, VecZ &x)
{
  for (int64 i = 0; i < A.n_rows; i++)
  {
    cplx acc = b[i];
    cplx aii(0.0, 0.0);
    for (int64 kk = A.rowptr[i]; kk < A.rowptr[i + 1]; kk++)
    {
      int64 j = A.col[kk];
      if (j == i)
        aii = A.val[kk];
      else
        acc -= A.val[kk] * x[j];
    }
    if (aii == cplx(0.0, 0.0))
      throw std::runtime_error("gauss_seidel_sweep: zero diagonal");
    x[i] = acc / aii;
  }
}

DirectSolverZ::DirectSolverZ(const CsrZ &A) : n_(A.n_rows)
{
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(A.val.size());
  for (int64 i = 0; i < A.n_rows; i++)
    for (int64 kk = A.rowptr[i]; kk < A.rowptr[i + 1]; kk++)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(A.col[kk]), A.val[kk]);
  Eigen::SparseMatrix<cplx> mat(A.n_rows, A.n_cols);
  mat.setFromTriplets(trips.begin(), trips.end());
  lu_.compute(mat);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("DirectSolverZ: factorization failed");
}

void DirectSolverZ::solve(const cplx *b, cplx *x) const
{
  Eigen::Map<const Eigen::VectorXcd> bm(b, n_);
  Eigen::VectorXcd sol = lu_.solve(bm);
  Eigen::Map<Eigen::VectorXcd>(x, n_) = sol;
}

}  // namespace hdgmg
