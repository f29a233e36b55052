// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_TRANSFER_HPP
#define HDGMG_TRANSFER_HPP

#include <vector>

#include "hdgmg/hdg.hpp"
#include "hdgmg/mesh.hpp"
#include "hdgmg/types.hpp"

namespace hdgmg
{

// Index layout of the nodal degrees of freedom of the continuous piecewise
// P_p space used by the averaging recipe: vertex values, then p-1 lattice
// values per edge (along the global edge orientation), then the interior
// lattice values of each triangle.
struct ContLayout
{
  int p = 1, nv = 0, ne = 0, nt = 0, per_edge = 0, per_tri = 0;

  int64 total() const
  {
    return nv + static_cast<int64>(ne) * per_edge + static_cast<int64>(nt) * per_tri;
  }
  int64 vertex(int v) const { return v; }
  int64 edge_node(int e, int i) const
  {
    return nv + static_cast<int64>(e) * per_edge + (i - 1);
  }
  int64 tri_node(int t, int j) const
  {
    return nv + static_cast<int64>(ne) * per_edge + static_cast<int64>(t) * per_tri + j;
  }
};

ContLayout cont_layout(const Mesh2D &mesh, int p);

// Averaging recipe: skeleton trace dofs -> continuous nodal values.  Vertex
// rows average the incident edge traces; edge rows evaluate the edge's own
// trace polynomial; for p >= 3 the element-interior rows apply the element's
// local lifting (hence complex entries for the Helmholtz operators).
CsrZ recipe_matrix(const HelmholtzAssembler &asmb);
// Same recipe for the Poisson space with homogeneous Dirichlet data: every
// continuous node on the domain boundary is pinned to zero.
CsrD recipe_matrix_zero_bc(const PoissonAssembler &asmb);

// Point evaluation: continuous nodal values on level l -> skeleton dofs on
// level l+1, by evaluating the reconstruction at the fine Gauss-Lobatto
// points.  Points on coarse edges interpolate along the edge lattice.
CsrD eval_matrix(const MeshHierarchy2D &hier, int l, int p);

// One-level prolongations P[l] : skeleton space l -> l+1, l = 0 .. L-1.
std::vector<CsrZ> build_transfer(const MeshHierarchy2D &hier,
                                 const std::vector<const HelmholtzAssembler *> &levels);
// Poisson variant on the reduced (interior-dof) spaces.
std::vector<CsrD> build_transfer_zero_bc(const MeshHierarchy2D &hier,
                                         const std::vector<const PoissonAssembler *> &levels);

// Largest eigenvalue of P^T A_fine P mu = lambda A_coarse mu on the reduced
// Poisson spaces: the energy stability constant of the prolongation.
double energy_stability_ratio(const PoissonAssembler &coarse, const PoissonAssembler &fine,
                              const CsrD &P_reduced);

// Sparse helpers shared by the transfer chain.
CsrZ csr_matmul(const CsrZ &A, const CsrZ &B);
CsrD csr_matmul(const CsrD &A, const CsrD &B);
CsrZ csr_from_real(const CsrD &A);
CsrZ csr_identity(int64 n);
void csr_apply(const CsrZ &A, const cplx *x, cplx *y);          // y = A x
void csr_apply_adjoint(const CsrZ &A, const cplx *x, cplx *y);  // y = A^H x

}  // namespace hdgmg

#endif  // HDGMG_TRANSFER_HPP
