// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "hdgmg/kernels.hpp"
#include "hdgmg/solvers.hpp"
#include "hdgmg/types.hpp"

using namespace hdgmg;

namespace
{

std::mt19937 rng(77);

VecZ random_vec(int64 n)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VecZ v(static_cast<std::size_t>(n));
  for (cplx &z : v)
    z = cplx(d(rng), d(rng));
  return v;
}

// Diagonally dominant sparse test matrix: well conditioned, nonsymmetric.
CsrZ test_matrix(int64 n)
{
  TripletBuffer<cplx> buf(n, n);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int64 i = 0; i < n; i++)
  {
    buf.add(i, i, cplx(4.0 + d(rng), 1.0 + 0.2 * d(rng)));
    if (i > 0)
      buf.add(i, i - 1, cplx(d(rng), d(rng)));
    if (i + 1 < n)
      buf.add(i, i + 1, cplx(d(rng), d(rng)));
    buf.add(i, (i * 7 + 3) % n, cplx(0.3 * d(rng), 0.3 * d(rng)));
  }
  return buf.compress();
}

Eigen::MatrixXcd to_dense(const CsrZ &A)
{
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(A.n_rows, A.n_cols);
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      M(r, A.col[k]) += A.val[k];
  return M;
}

Eigen::VectorXcd to_eigen(const VecZ &v)
{
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<int64>(v.size()));
}

LinOpZ op_of(const CsrZ &A)
{
  return LinOpZ{A.n_rows, [&A](const cplx *x, cplx *y) { kernels::spmv_z(A, x, y); }};
}

double norm2(const VecZ &v)
{
  return std::sqrt(kernels::znrm2sq(v.size(), v.data()));
}

}  // namespace

TEST_CASE("gmres converges with a monotone recurrence history")
{
  CsrZ A = test_matrix(60);
  VecZ b = random_vec(60);
  GmresOptions opt;
  opt.tol = 1e-10;
  GmresResult res = gmres_solve(op_of(A), b, nullptr, opt);

  CHECK(res.converged);
  CHECK(res.true_relres < 1e-9);
  REQUIRE(res.history.size() >= 2);
  CHECK(res.history.front() == doctest::Approx(1.0));
  for (std::size_t k = 1; k < res.history.size(); k++)
    CHECK(res.history[k] <= res.history[k - 1] + 1e-14);

  // Residual of the returned iterate matches the reported true_relres.
  VecZ r(b.size());
  kernels::spmv_z(A, res.x.data(), r.data());
  for (std::size_t i = 0; i < r.size(); i++)
    r[i] = b[i] - r[i];
  CHECK(norm2(r) / norm2(b) == doctest::Approx(res.true_relres).epsilon(1e-10));
}

TEST_CASE("gmres residual equals the Krylov least-squares minimum")
{
  const int64 n = 30;
  const int k = 4;
  CsrZ A = test_matrix(n);
  VecZ b = random_vec(n);

  GmresOptions opt;
  opt.tol = 0.0;  // run exactly k steps
  opt.max_iter = k;
  GmresResult res = gmres_solve(op_of(A), b, nullptr, opt);
  REQUIRE(static_cast<int>(res.history.size()) == k + 1);

  // Dense oracle: min over the k-dimensional Krylov space span{b, Ab, ...}.
  Eigen::MatrixXcd Ad = to_dense(A);
  Eigen::VectorXcd bd = to_eigen(b);
  Eigen::MatrixXcd K(n, k);
  Eigen::VectorXcd col = bd;
  for (int j = 0; j < k; j++)
  {
    K.col(j) = col / col.norm();  // scale columns for conditioning
    col = Ad * K.col(j);
  }
  Eigen::MatrixXcd AK = Ad * K;
  Eigen::VectorXcd y = AK.colPivHouseholderQr().solve(bd);
  const double lsq = (bd - AK * y).norm() / bd.norm();

  CHECK(res.history.back() == doctest::Approx(lsq).epsilon(1e-8));
  CHECK(res.true_relres == doctest::Approx(lsq).epsilon(1e-8));
  CHECK(res.iters == k);
  CHECK(!res.converged);
}

TEST_CASE("identity operator converges in one step")
{
  const int64 n = 12;
  LinOpZ id{n, [](const cplx *x, cplx *y) { std::copy(x, x + 12, y); }};
  VecZ b = random_vec(n);
  GmresOptions opt;
  GmresResult res = gmres_solve(id, b, nullptr, opt);
  CHECK(res.converged);
  CHECK(res.iters == 1);
  CHECK(res.true_relres < 1e-14);
}

TEST_CASE("initial guess is honored")
{
  CsrZ A = test_matrix(25);
  VecZ b = random_vec(25);
  GmresOptions opt;
  opt.tol = 1e-12;
  GmresResult ref = gmres_solve(op_of(A), b, nullptr, opt);

  // Starting from the solution: immediate convergence.
  GmresResult warm = gmres_solve(op_of(A), b, &ref.x, opt);
  CHECK(warm.true_relres < 1e-10);
  CHECK(warm.iters <= 1);
}

TEST_CASE("left preconditioning reports the preconditioned recurrence residual")
{
  CsrZ A = test_matrix(40);
  VecZ b = random_vec(40);

  // Fixed linear preconditioner: diagonal scaling.
  VecZ dinv(40);
  for (int64 i = 0; i < 40; i++)
  {
    for (int64 k = A.rowptr[i]; k < A.rowptr[i + 1]; k++)
      if (A.col[k] == i)
        dinv[static_cast<std::size_t>(i)] = 1.0 / A.val[k];
  }
  auto prec = [&dinv](const cplx *r, cplx *z) {
    for (std::size_t i = 0; i < dinv.size(); i++)
      z[i] = dinv[i] * r[i];
  };

  GmresOptions opt;
  opt.tol = 1e-8;
  opt.prec = prec;
  opt.flexible = false;
  GmresResult res = gmres_solve(op_of(A), b, nullptr, opt);
  CHECK(res.converged);

  // With a LINEAR preconditioner the recurrence value is honest: recompute
  // ||P(b - Ax)|| / ||P b|| directly.
  VecZ r(b.size()), pr(b.size()), pb(b.size());
  kernels::spmv_z(A, res.x.data(), r.data());
  for (std::size_t i = 0; i < r.size(); i++)
    r[i] = b[i] - r[i];
  prec(r.data(), pr.data());
  prec(b.data(), pb.data());
  const double honest = norm2(pr) / norm2(pb);
  CHECK(res.history.back() == doctest::Approx(honest).epsilon(1e-6));

  // Flexible right preconditioning with the same operator: recurrence value
  // tracks the unpreconditioned true residual instead.
  GmresOptions fopt = opt;
  fopt.flexible = true;
  GmresResult fres = gmres_solve(op_of(A), b, nullptr, fopt);
  CHECK(fres.converged);
  CHECK(fres.history.back() == doctest::Approx(fres.true_relres).epsilon(1e-6));
}

TEST_CASE("tol = 0 runs exactly max_iter steps")
{
  CsrZ A = test_matrix(20);
  VecZ b = random_vec(20);
  GmresOptions opt;
  opt.tol = 0.0;
  opt.max_iter = 7;
  GmresResult res = gmres_solve(op_of(A), b, nullptr, opt);
  CHECK(res.iters == 7);
  CHECK(!res.converged);
}

TEST_CASE("weighted Jacobi sweep is the textbook affine update")
{
  CsrZ A = test_matrix(15);
  VecZ b = random_vec(15), x = random_vec(15), scratch(15);
  VecZ diag(15);
  for (int64 i = 0; i < 15; i++)
    for (int64 k = A.rowptr[i]; k < A.rowptr[i + 1]; k++)
      if (A.col[k] == i)
        diag[static_cast<std::size_t>(i)] = A.val[k];

  Eigen::MatrixXcd Ad = to_dense(A);
  Eigen::VectorXcd xe = to_eigen(x), be = to_eigen(b);
  const double omega = 0.6;
  Eigen::VectorXcd expect =
      xe + omega * (to_eigen(diag).cwiseInverse().asDiagonal() * (be - Ad * xe)).eval();

  weighted_jacobi_sweep(A, diag, omega, b, x, scratch);
  CHECK((to_eigen(x) - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Gauss-Seidel sweep matches the dense forward update and is exact on "
          "lower-triangular systems")
{
  CsrZ A = test_matrix(15);
  VecZ b = random_vec(15), x = random_vec(15);

  Eigen::MatrixXcd Ad = to_dense(A);
  Eigen::MatrixXcd DL = Ad.triangularView<Eigen::Lower>();
  Eigen::VectorXcd xe = to_eigen(x), be = to_eigen(b);
  Eigen::VectorXcd expect =
      xe + DL.triangularView<Eigen::Lower>().solve((be - Ad * xe).eval());

  gauss_seidel_sweep(A, b, x);
  CHECK((to_eigen(x) - expect).cwiseAbs().maxCoeff() < 1e-13);

  // Strictly lower-triangular A (plus diagonal): one sweep from zero solves.
  TripletBuffer<cplx> buf(10, 10);
  for (int64 i = 0; i < 10; i++)
  {
    buf.add(i, i, cplx(2.0, 0.5));
    if (i > 0)
      buf.add(i, i - 1, cplx(0.7, -0.1));
  }
  CsrZ L = buf.compress();
  VecZ bl = random_vec(10), xl(10, cplx(0, 0));
  gauss_seidel_sweep(L, bl, xl);
  VecZ r(10);
  kernels::spmv_z(L, xl.data(), r.data());
  for (int i = 0; i < 10; i++)
    CHECK(std::abs(r[static_cast<std::size_t>(i)] - bl[static_cast<std::size_t>(i)]) < 1e-13);
}

TEST_CASE("Gauss-Seidel rejects a vanishing diagonal")
{
  TripletBuffer<cplx> buf(3, 3);
  buf.add(0, 0, cplx(1, 0));
  buf.add(1, 2, cplx(1, 0));  // no (1,1) entry
  buf.add(2, 2, cplx(1, 0));
  CsrZ A = buf.compress();
  VecZ b(3, cplx(1, 0)), x(3, cplx(0, 0));
  CHECK_THROWS(gauss_seidel_sweep(A, b, x));
}

TEST_CASE("direct solver reproduces a dense LU solve")
{
  CsrZ A = test_matrix(40);
  VecZ b = random_vec(40);
  DirectSolverZ direct(A);
  VecZ x(40);
  direct.solve(b.data(), x.data());

  Eigen::VectorXcd xd = to_dense(A).partialPivLu().solve(to_eigen(b));
  CHECK((to_eigen(x) - xd).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(direct.n() == 40);
}

TEST_CASE("zero right-hand side returns the zero iterate without dividing by zero")
{
  CsrZ A = test_matrix(12);
  LinOpZ op = op_of(A);
  VecZ b(12, cplx(0, 0));
  GmresOptions opt;
  opt.tol = 0.0;  // the smoothing convention: no early tolerance exit
  opt.max_iter = 3;
  GmresResult res = gmres_solve(op, b, nullptr, opt);
  CHECK(res.converged);
  CHECK(res.true_relres == 0.0);
  for (const cplx &z : res.x)
  {
    CHECK(std::isfinite(z.real()));
    CHECK(z == cplx(0.0, 0.0));
  }
}
