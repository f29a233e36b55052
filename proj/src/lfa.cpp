// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/lfa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace hdgmg::lfa
{

namespace
{

constexpr cplx iu(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;
constexpr double kResTol = 1e-10;  // skip resonant (non-invertible) symbols

double sgn(double x)
{
  return x < 0.0 ? -1.0 : 1.0;
}

double alias(double theta)
{
  return theta - sgn(theta) * kPi;
}

double rho2(const Eigen::Matrix2cd &M)
{
  cplx tr = M(0, 0) + M(1, 1);
  cplx det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  cplx disc = std::sqrt(tr * tr - 4.0 * det);
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

double rho4(const Eigen::Matrix4cd &M)
{
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
  double r = 0.0;
  for (int i = 0; i < 4; i++)
    r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

cplx smoother_symbol(const Stencil &st, Smoother sm, double omega, double theta)
{
  return sm == Smoother::jacobi ? jacobi_symbol(st, omega, theta) : gs_symbol(st, theta);
}

}  // namespace

Stencil stencil_closed_form(double t)
{
  const cplx s1g = iu * (t * t * t * t) + t * t * cplx(8.0, -12.0) + cplx(-72.0, -12.0);
  const cplx s2g = cplx(36.0 * t - 2.0 * t * t * t, 0.0);
  const cplx s3g = cplx(6.0 * t * t - 72.0, 12.0);
  const cplx s4g = cplx(t * t * t * t - 24.0 * t * t + 148.0, 0.0);
  const double t3 = t * t * t, t5 = t3 * t * t, t7 = t5 * t * t;
  const double q5 = t5 - 24.0 * t3 + 148.0 * t;

  Stencil st;
  st.s1 = (1.0 / t) * (s2g / (t * s1g) -
                       s2g * (iu * 3.0 * t * t + 18.0) / ((18.0 * t - t3) * s1g)) -
          (iu * (-2.0 * t * t * t * t + 12.0 * t * t) + cplx(72.0, 136.0)) / q5 -
          cplx(6.0 * t * t - 72.0, 12.0) / q5;

  const double t4 = t * t * t * t, t6 = t4 * t * t, t8 = t6 * t * t;
  const cplx num0 = iu * (-4.0 * t7) + t5 * cplx(20.0, 84.0) + t3 * cplx(-432.0, -480.0) +
                    t * cplx(2736.0, 432.0);
  const double den0 = t * (t8 - 24.0 * t6 + 184.0 * t4 - 864.0 * t * t + 5328.0);
  st.s0 = -(1.0 / t) * (s3g / s4g - num0 / den0 + 1.0) -
          (iu * (-4.0 * t4 + 60.0 * t * t) + cplx(72.0, -160.0)) / q5 - s3g / (t * s4g);
  return st;
}

Stencil stencil_condensed(double t)
{
  const double tau = 1.0 / t;
  Eigen::Matrix2cd M, D, Cn;
  M << 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0;
  D << -0.5, -0.5, 0.5, 0.5;
  Cn << -1.0, 0.0, 0.0, 1.0;

  Eigen::Matrix4cd K = Eigen::Matrix4cd::Zero();
  K.block<2, 2>(0, 0) = iu * t * M;
  K.block<2, 2>(0, 2) = -D;
  K.block<2, 2>(2, 0) = -D + Cn;
  K.block<2, 2>(2, 2) = iu * t * M + tau * Eigen::Matrix2cd::Identity();

  Eigen::Matrix<cplx, 4, 2> B;
  B << 1.0, 0.0, 0.0, -1.0, tau, 0.0, 0.0, tau;
  Eigen::Matrix<cplx, 2, 4> G;
  G << -1.0, 0.0, tau, 0.0, 0.0, 1.0, 0.0, tau;

  Eigen::Matrix2cd AT =
      tau * Eigen::Matrix2cd::Identity() - G * K.partialPivLu().solve(B);
  // Assembled diagonal couples the two elements sharing a node.
  return Stencil{-(AT(0, 0) + AT(1, 1)), -AT(0, 1)};
}

cplx symbol(const Stencil &st, double theta)
{
  return 2.0 * st.s1 * std::cos(theta) + st.s0;
}

cplx jacobi_symbol(const Stencil &st, double omega, double theta)
{
  return 1.0 - (omega / st.s0) * symbol(st, theta);
}

cplx gs_symbol(const Stencil &st, double theta)
{
  return -st.s1 * std::exp(iu * theta) / (st.s1 * std::exp(-iu * theta) + st.s0);
}

double grid_transfer_symbol(double theta)
{
  return 0.5 * (1.0 + std::cos(theta));
}

Eigen::Matrix2cd two_level_matrix(double t, double theta0, double omega, double mu0,
                                  double mu1, Smoother sm)
{
  Stencil fine = stencil_condensed(t), coarse = stencil_condensed(2.0 * t);
  const double th[2] = {theta0, alias(theta0)};
  cplx A0 = symbol(coarse, 2.0 * theta0);

  Eigen::Vector2cd p, Af;
  Eigen::RowVector2cd r;
  Eigen::Matrix2cd S = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; a++)
  {
    p[a] = grid_transfer_symbol(th[a]);
    r[a] = 2.0 * grid_transfer_symbol(th[a]);
    Af[a] = symbol(fine, th[a]);
    S(a, a) = smoother_symbol(fine, sm, omega, th[a]);
  }
  Eigen::Matrix2cd CGC =
      Eigen::Matrix2cd::Identity() - (mu0 / A0) * (p * (r * Af.asDiagonal()));
  Eigen::Matrix2cd SM =
      Eigen::Matrix2cd::Identity() - mu1 * (Eigen::Matrix2cd::Identity() - S);
  return SM * CGC;
}

Eigen::Matrix4cd three_level_matrix(double t, double theta0, double omega, double mu,
                                    Smoother sm, bool exact_middle, double mu0_override)
{
  const double mu0 = mu0_override >= 0.0 ? mu0_override : mu;
  Stencil fF = stencil_condensed(t), fM = stencil_condensed(2.0 * t),
          fC = stencil_condensed(4.0 * t);
  double thm[2] = {theta0, alias(theta0)};
  double thf[2][2];
  for (int a = 0; a < 2; a++)
  {
    thf[a][0] = thm[a] / 2.0;
    thf[a][1] = alias(thm[a] / 2.0);
  }

  Eigen::Matrix4cd A2 = Eigen::Matrix4cd::Zero(), S2 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix<cplx, 4, 2> P12 = Eigen::Matrix<cplx, 4, 2>::Zero();
  Eigen::Matrix<cplx, 2, 4> R21 = Eigen::Matrix<cplx, 2, 4>::Zero();
  Eigen::Matrix2cd A1 = Eigen::Matrix2cd::Zero(), S1 = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; a++)
  {
    A1(a, a) = symbol(fM, thm[a]);
    S1(a, a) = smoother_symbol(fM, sm, omega, thm[a]);
    for (int b = 0; b < 2; b++)
    {
      int row = 2 * a + b;
      A2(row, row) = symbol(fF, thf[a][b]);
      S2(row, row) = smoother_symbol(fF, sm, omega, thf[a][b]);
      P12(row, a) = grid_transfer_symbol(thf[a][b]);
      R21(a, row) = 2.0 * grid_transfer_symbol(thf[a][b]);
    }
  }
  cplx A0 = symbol(fC, 2.0 * theta0);
  Eigen::Vector2cd p01;
  Eigen::RowVector2cd r10;
  for (int a = 0; a < 2; a++)
  {
    p01[a] = grid_transfer_symbol(thm[a]);
    r10[a] = 2.0 * grid_transfer_symbol(thm[a]);
  }

  Eigen::Matrix4cd I4 = Eigen::Matrix4cd::Identity();
  Eigen::Matrix4cd Fc = I4 - mu0 * (P12 * p01) * (1.0 / A0) * (r10 * R21 * A2);
  Eigen::Matrix2cd mid_core = A1.inverse();
  if (!exact_middle)
    mid_core = (Eigen::Matrix2cd::Identity() - S1) * mid_core;
  Eigen::Matrix4cd Fm = I4 - mu * P12 * mid_core * R21 * A2;
  Eigen::Matrix4cd Ff = I4 - mu * (I4 - S2);
  return Ff * Fm * Fc;
}

SweepResult two_level_sweep(double t, double omega, double mu, int n_samples, Smoother sm)
{
  Stencil fine = stencil_condensed(t), coarse = stencil_condensed(2.0 * t);
  SweepResult res;
  for (int j = 0; j < n_samples; j++)
  {
    double th = -kPi / 2.0 + (j + 0.5) * kPi / n_samples;
    if (std::abs(symbol(coarse, 2.0 * th)) < kResTol)
      continue;
    if (sm == Smoother::gs &&
        (std::abs(fine.s1 * std::exp(-iu * th) + fine.s0) < kResTol ||
         std::abs(fine.s1 * std::exp(-iu * alias(th)) + fine.s0) < kResTol))
      continue;
    double r = rho2(two_level_matrix(t, th, omega, mu, mu, sm));
    res.samples_used++;
    if (r > res.sup_rho)
    {
      res.sup_rho = r;
      res.argmax_theta = th;
    }
  }
  return res;
}

SweepResult three_level_sweep(double t, double omega, double mu, int n_samples, Smoother sm)
{
  Stencil fM = stencil_condensed(2.0 * t), fC = stencil_condensed(4.0 * t);
  SweepResult res;
  for (int j = 0; j < n_samples; j++)
  {
    double th = -kPi / 2.0 + (j + 0.5) * kPi / n_samples;
    if (std::abs(symbol(fC, 2.0 * th)) < kResTol ||
        std::abs(symbol(fM, th)) < kResTol || std::abs(symbol(fM, alias(th))) < kResTol)
      continue;
    double r = rho4(three_level_matrix(t, th, omega, mu, sm));
    res.samples_used++;
    if (r > res.sup_rho)
    {
      res.sup_rho = r;
      res.argmax_theta = th;
    }
  }
  return res;
}

SweepResult smoother_sweep(double t, double omega, int n_samples, Smoother sm)
{
  Stencil st = stencil_condensed(t);
  SweepResult res;
  for (int j = 0; j < n_samples; j++)
  {
    double th = -kPi + (j + 0.5) * 2.0 * kPi / n_samples;
    if (sm == Smoother::gs && std::abs(st.s1 * std::exp(-iu * th) + st.s0) < kResTol)
      continue;
    double r = std::abs(smoother_symbol(st, sm, omega, th));
    res.samples_used++;
    if (r > res.sup_rho)
    {
      res.sup_rho = r;
      res.argmax_theta = th;
    }
  }
  return res;
}

MeasuredTwoLevel::MeasuredTwoLevel(double t, int N, double omega, double mu) : N_(N)
{
  if (N % 2 != 0)
    throw std::invalid_argument("MeasuredTwoLevel: N must be even");
  const int Nc = N / 2;
  Stencil fine = stencil_condensed(t), coarse = stencil_condensed(2.0 * t);

  Eigen::MatrixXcd A1 = Eigen::MatrixXcd::Zero(N, N), A0 = Eigen::MatrixXcd::Zero(Nc, Nc);
  for (int j = 0; j < N; j++)
  {
    A1(j, j) = fine.s0;
    A1(j, (j + 1) % N) = fine.s1;
    A1(j, (j + N - 1) % N) = fine.s1;
  }
  for (int j = 0; j < Nc; j++)
  {
    A0(j, j) = coarse.s0;
    A0(j, (j + 1) % Nc) = coarse.s1;
    A0(j, (j + Nc - 1) % Nc) = coarse.s1;
  }
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, Nc);
  for (int j = 0; j < Nc; j++)
  {
    P(2 * j, j) = 1.0;
    P((2 * j + 1) % N, j) = 0.5;
    P((2 * j + N - 1) % N, j) = 0.5;
  }
  Eigen::MatrixXcd R = P.transpose();

  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  Eigen::MatrixXcd S = I - (omega / fine.s0) * A1;
  Eigen::MatrixXcd CGC = I - mu * (P * A0.partialPivLu().solve(R * A1));
  E_ = (I - mu * (I - S)) * CGC;
}

double MeasuredTwoLevel::rho_pair(int k, double *defect) const
{
  if (k == 0 || std::abs(k) >= N_ / 4)
    throw std::invalid_argument("MeasuredTwoLevel::rho_pair: k out of range");
  const double th0 = 2.0 * kPi * k / N_;
  const double th[2] = {th0, alias(th0)};
  Eigen::MatrixXcd V(N_, 2), W(N_, 2);
  for (int a = 0; a < 2; a++)
    for (int j = 0; j < N_; j++)
      V(j, a) = std::exp(iu * (th[a] * j));
  W = E_ * V;
  Eigen::Matrix2cd C = (V.adjoint() * W) / static_cast<double>(N_);
  if (defect)
    *defect = (W - V * C).norm() / std::sqrt(static_cast<double>(N_));
  return rho2(C);
}

AmplificationResult gmres_amplification_experiment(double kappa, double h, double omega,
                                                   int n_freq, bool residual_norm)
{
  const double t = kappa * h;
  Stencil st = stencil_condensed(t);
  const int ncell = static_cast<int>(std::lround(10.0 / h));
  const int n = ncell - 1;  // interior nodes of (0, 10)

  auto apply_A = [&](const VecZ &u, VecZ &out) {
    for (int i = 0; i < n; i++)
    {
      cplx acc = st.s0 * u[i];
      if (i > 0)
        acc += st.s1 * u[i - 1];
      if (i + 1 < n)
        acc += st.s1 * u[i + 1];
      out[i] = acc;
    }
  };
  auto nrm = [&](const VecZ &u) {
    double s = 0.0;
    for (const cplx &v : u)
      s += std::norm(v);
    return std::sqrt(s);
  };
  auto measure = [&](const VecZ &u0, const VecZ &u1) {
    if (!residual_norm)
      return nrm(u1) / nrm(u0);
    VecZ r0(n), r1(n);
    apply_A(u0, r0);
    apply_A(u1, r1);
    return nrm(r1) / nrm(r0);
  };

  AmplificationResult res;
  VecZ u0(n), u1(n), Au(n), r0(n), Ar(n);
  for (int kf = 0; kf < n_freq; kf++)
  {
    double theta = (kf + 0.5) * kPi / n_freq;
    for (int i = 0; i < n; i++)
      u0[i] = std::exp(iu * (theta * (i + 1)));

    // Damped Jacobi on A u = 0.
    apply_A(u0, Au);
    for (int i = 0; i < n; i++)
      u1[i] = u0[i] - omega * Au[i] / st.s0;
    double rj = measure(u0, u1);

    // Forward Gauss-Seidel.
    for (int i = 0; i < n; i++)
    {
      cplx acc(0.0, 0.0);
      if (i > 0)
        acc -= st.s1 * u1[i - 1];
      if (i + 1 < n)
        acc -= st.s1 * u0[i + 1];
      u1[i] = acc / st.s0;
    }
    double rg = measure(u0, u1);

    // One minimal-residual (GMRES(1)) step.
    apply_A(u0, Au);
    for (int i = 0; i < n; i++)
      r0[i] = -Au[i];
    apply_A(r0, Ar);
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (int i = 0; i < n; i++)
    {
      num += std::conj(Ar[i]) * r0[i];
      den += std::norm(Ar[i]);
    }
    cplx gamma = num / den;
    for (int i = 0; i < n; i++)
      u1[i] = u0[i] + gamma * r0[i];
    double rm = measure(u0, u1);

    res.theta.push_back(theta);
    res.rho_jacobi.push_back(rj);
    res.rho_gs.push_back(rg);
    res.rho_gmres.push_back(rm);
    res.max_jacobi = std::max(res.max_jacobi, rj);
    res.max_gs = std::max(res.max_gs, rg);
    res.max_gmres = std::max(res.max_gmres, rm);
    if (rm <= rj + 1e-12 && rm <= rg + 1e-12)
      res.frac_gmres_le_both += 1.0;
  }
  res.frac_gmres_le_both /= n_freq;
  return res;
}

}  // namespace hdgmg::lfa
