// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_HDG_HPP
#define HDGMG_HDG_HPP

#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <vector>

#include "hdgmg/basis.hpp"
#include "hdgmg/mesh.hpp"
#include "hdgmg/quadrature.hpp"
#include "hdgmg/types.hpp"

namespace hdgmg
{

// Helmholtz model problem in first-order form with a Robin boundary condition,
//   i k q + grad u = 0,  i k u + div q = f  in Omega,
//   -q.n + u = g          on the boundary,
// where k may vary by mesh region (piecewise constant).
struct HelmholtzProblem
{
  std::vector<double> kappa_by_region;  // region r uses kappa_by_region[r]
  std::function<cplx(const Vec2 &)> f;
  std::function<cplx(const Vec2 &)> g;
  int p = 1;  // polynomial degree of all spaces

  double kappa_of(int region) const { return kappa_by_region[static_cast<size_t>(region)]; }
  double kappa_max() const;
};

// Statically condensed skeleton system on one mesh level.  Ahat is the
// sesquilinear-form matrix; A = M^-1 Ahat is the operator form used by the
// iteration, where M is the block-diagonal skeleton mass matrix whose block
// for edge e is mass_weight[e] * Mseg (mass_weight = multiplicity * length).
struct SkeletonSystem
{
  int level = 0;
  int p = 1;
  int n = 0;  // cells per side of the underlying mesh
  int64 n_dofs = 0;
  CsrZ A;     // operator form, M^-1 Ahat
  CsrZ Ahat;  // bilinear form matrix
  VecZ F;     // operator-form right-hand side, M^-1 Fhat
  VecZ Fhat;  // moment-form right-hand side
  VecZ diag;  // diagonal of A
  std::vector<double> mass_weight;  // per edge: multiplicity * |e|
  Eigen::MatrixXd Mseg, Mseg_inv;   // unit reference trace mass and its inverse

  void apply_mass(const cplx *x, cplx *y) const;
  void solve_mass(const cplx *x, cplx *y) const;
  // Broken skeleton inner product <v, conj(w)> induced by M.
  cplx mass_dot(const VecZ &v, const VecZ &w) const;
};

// Recovered element-local fields: for each triangle the stacked coefficient
// vector z = [qx; qy; u], each of length np.
struct InteriorFields
{
  int p = 1;
  int np = 0;
  std::vector<Eigen::VectorXcd> z;
};

// Degree-dependent reference tables shared by all elements.
struct RefData
{
  int p, np, m;  // np = dim P_p(tri), m = p + 1 trace dofs per edge
  TriBasis tb;
  SegBasis sb;
  QuadRuleTri tq;  // volume rule
  QuadRule1D q1;   // edge rule
  Eigen::MatrixXd Phi, Gxi, Geta;      // volume basis tables (quad point x basis)
  Eigen::MatrixXd seg_fwd, seg_rev;    // trace basis at s and 1 - s
  Eigen::MatrixXd edge_phi[3];         // volume basis along each local edge
  Eigen::MatrixXd Mseg;                // unit-interval trace mass matrix

  explicit RefData(int p);
};

// Element-local operators for the condensation z = Z lambda + K^-1 rhs and
// the condensed block AT = L - G Z.  Shared between congruent elements.
struct LocalOps
{
  int np = 0, m = 0;
  double tau = 0.0, hT = 0.0;
  Eigen::MatrixXcd K, B, Z, G, AT;
  Eigen::MatrixXd L;  // penalty block, tau * blockdiag(|e_k| Mseg)
  Eigen::PartialPivLU<Eigen::MatrixXcd> luK;
  Eigen::MatrixXd M;           // volume mass matrix
  Eigen::MatrixXd cross0[3];   // per local edge: int_e phi_i chi_a
  double len[3] = {0, 0, 0};   // local edge lengths
};

// Assembles the condensed skeleton problem for the Helmholtz model and
// provides local recovery, flux moments, and error evaluation.
class HelmholtzAssembler
{
public:
  HelmholtzAssembler(const Mesh2D &mesh, HelmholtzProblem prob);

  SkeletonSystem assemble() const;
  InteriorFields recover_interior(const VecZ &lambda) const;

  // Solves the uncondensed block system (element equations plus flux
  // transmission and Robin rows) directly; used to cross-check condensation.
  VecZ solve_full_trace() const;

  // Relative residual of element t's local equations at the recovered fields.
  double local_residual(int t, const VecZ &lambda) const;
  // Moments <qhat.n, chi> of the numerical flux of element t on its edges.
  Eigen::VectorXcd flux_moments(int t, const VecZ &lambda,
                                const InteriorFields &fields) const;

  double trace_error(const VecZ &lambda,
                     const std::function<cplx(const Vec2 &)> &exact) const;
  double volume_error(const InteriorFields &fields,
                      const std::function<cplx(const Vec2 &)> &exact) const;
  // Nodal interpolant of a function into the skeleton space.
  VecZ trace_of(const std::function<cplx(const Vec2 &)> &fn) const;

  const LocalOps &local_ops(int t) const;
  const Mesh2D &mesh() const { return mesh_; }
  const HelmholtzProblem &problem() const { return prob_; }
  const RefData &ref() const { return *ref_; }

private:
  Eigen::VectorXcd f_moments(int t) const;
  Eigen::VectorXcd local_solve(int t, const VecZ &lambda) const;

  const Mesh2D &mesh_;
  HelmholtzProblem prob_;
  std::shared_ptr<RefData> ref_;
  std::vector<std::shared_ptr<LocalOps>> ops_;
};

// Poisson companion discretization (same spaces, tau = c / h_T, homogeneous
// Dirichlet data): condensed matrix on interior skeleton dofs plus the energy
// form a(lambda, lambda) used by the transfer stability check.
class PoissonAssembler
{
public:
  PoissonAssembler(const Mesh2D &mesh, int p, double c = 1.0);

  // SPD condensed matrix restricted to interior-edge dofs.
  Eigen::SparseMatrix<double> assemble0() const;
  // Energy a(lambda, lambda) of a full-skeleton coefficient vector.
  double energy(const VecD &lambda) const;
  // Element fields [qx; qy; u] recovered from a full-skeleton vector.
  std::vector<Eigen::VectorXd> recover(const VecD &lambda) const;
  // Rows of the local solver mapping traces to the interior u coefficients.
  Eigen::MatrixXd local_u_map(int t) const;

  int reduced_index(int64 dof) const { return red_[static_cast<size_t>(dof)]; }
  int n_reduced() const { return n_red_; }
  const Mesh2D &mesh() const { return mesh_; }
  const RefData &ref() const { return *ref_; }

private:
  const Mesh2D &mesh_;
  int p_;
  double c_;
  std::shared_ptr<RefData> ref_;
  std::vector<std::shared_ptr<LocalOps>> ops_;
  std::vector<int> red_;  // skeleton dof -> interior index, -1 on the boundary
  int n_red_ = 0;
};

// Interior u rows of the Helmholtz local solver of element t (trace lifting).
Eigen::MatrixXcd helmholtz_local_u_map(const HelmholtzAssembler &asmb, int t);

}  // namespace hdgmg

#endif  // HDGMG_HDG_HPP
