// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_LFA_HPP
#define HDGMG_LFA_HPP

#include <Eigen/Dense>
#include <vector>

#include "hdgmg/types.hpp"

namespace hdgmg::lfa
{

// Three-point stencil of the condensed 1D lowest-order operator at t = kappa*h;
// the symbol is A(theta) = 2 s1 cos(theta) + s0.
struct Stencil
{
  cplx s0, s1;
};

// Closed-form coefficients of the condensed symbol as a function of t.
Stencil stencil_closed_form(double t);
// The same coefficients obtained by direct static condensation of the 1D
// discretization (sign convention matching the closed form).
Stencil stencil_condensed(double t);

cplx symbol(const Stencil &st, double theta);
// Error-propagation symbols of one damped Jacobi / Gauss-Seidel sweep.
cplx jacobi_symbol(const Stencil &st, double omega, double theta);
cplx gs_symbol(const Stencil &st, double theta);
// Linear-interpolation prolongation symbol (1 + cos theta) / 2; the full
// weighting restriction used here is its transpose, with symbol 1 + cos theta.
double grid_transfer_symbol(double theta);

enum class Smoother
{
  jacobi,
  gs
};

// Two-level error propagation matrix on the aliasing pair of theta0 in
// (-pi/2, pi/2) \ {0}: one damped coarse-grid correction (weight mu0, exact
// coarse solve at 2t) followed by one damped smoothing step (weight mu1).
Eigen::Matrix2cd two_level_matrix(double t, double theta0, double omega, double mu0,
                                  double mu1, Smoother sm);

// Three-level matrix on the four finest harmonics generated by the mid-level
// fundamental theta0: damped exact-coarsest correction, damped one-sweep
// mid-level correction, damped fine smoothing (all with weight mu).
// exact_middle replaces the mid-level sweep by an exact solve, which must
// reduce the operator to two independent two-level blocks when mu0 = 0.
Eigen::Matrix4cd three_level_matrix(double t, double theta0, double omega, double mu,
                                    Smoother sm, bool exact_middle = false,
                                    double mu0_override = -1.0);

struct SweepResult
{
  double sup_rho = 0.0;
  double argmax_theta = 0.0;
  int samples_used = 0;
};

// sup over the fundamental frequencies (midpoint sampling, resonant coarse
// symbols excluded) of the spectral radius of the two/three-level matrices.
SweepResult two_level_sweep(double t, double omega, double mu, int n_samples, Smoother sm);
SweepResult three_level_sweep(double t, double omega, double mu, int n_samples, Smoother sm);
// sup of |smoother symbol| alone.
SweepResult smoother_sweep(double t, double omega, int n_samples, Smoother sm);

// Discrete two-grid error propagation operator on an N-cell periodic mesh
// (damped Jacobi smoothing); rho_pair measures the contraction on the
// harmonic pair of wave index k and must agree with the two-level symbol.
class MeasuredTwoLevel
{
public:
  MeasuredTwoLevel(double t, int N, double omega, double mu);
  // Spectral radius on span{exp(i theta0 j), exp(i theta1 j)}, k in
  // (-N/4, N/4) \ {0}; *defect receives the off-span leakage if given.
  double rho_pair(int k, double *defect = nullptr) const;
  int n() const { return N_; }

private:
  int N_;
  Eigen::MatrixXcd E_;
};

// Single-step smoother amplification comparison on the 1D Dirichlet problem
// (condensed matrix on an interval): damped Jacobi, Gauss-Seidel, and one
// minimal-residual (GMRES(1)) step applied to A u = 0 seeded with a discrete
// Fourier mode.  rho is the iterate-norm ratio ||u1|| / ||u0|| by default, or
// the residual-norm ratio when residual_norm is set.
struct AmplificationResult
{
  std::vector<double> theta, rho_jacobi, rho_gs, rho_gmres;
  double frac_gmres_le_both = 0.0;  // fraction of modes where GMRES(1) is best
  double max_jacobi = 0.0, max_gs = 0.0, max_gmres = 0.0;
};

AmplificationResult gmres_amplification_experiment(double kappa, double h, double omega,
                                                   int n_freq, bool residual_norm);

}  // namespace hdgmg::lfa

#endif  // HDGMG_LFA_HPP
