// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/transfer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdgmg
{

namespace
{

constexpr double kDropTol = 1e-14;

// 1D Lagrange basis on the uniform lattice {0, 1/p, ..., 1}.
Eigen::RowVectorXd lattice_basis_1d(int p, double s)
{
  Eigen::RowVectorXd v(p + 1);
  for (int i = 0; i <= p; i++)
  {
    double acc = 1.0;
    for (int j = 0; j <= p; j++)
      if (j != i)
        acc *= (s - static_cast<double>(j) / p) / (static_cast<double>(i - j) / p);
    v[i] = acc;
  }
  return v;
}

// Continuous node id of lattice node `node` of triangle t, given the layout.
int64 lattice_to_cont(const Mesh2D &mesh, const ContLayout &lay, const TriBasis &tb, int t,
                      int node, int &interior_ordinal)
{
  const Tri2D &tri = mesh.tris[t];
  int loc = tb.node_location(node);
  if (loc < 3)
    return lay.vertex(tri.v[loc]);
  if (loc < 6)
  {
    int le = loc - 3;
    double s = tb.node_edge_param(node);
    if (tri.sign[le] < 0)
      s = 1.0 - s;
    int i = static_cast<int>(std::lround(s * lay.p));
    return lay.edge_node(tri.edge[le], i);
  }
  return lay.tri_node(t, interior_ordinal++);
}

// Whether a continuous node lies on the domain boundary (pinning set of the
// homogeneous Dirichlet variant).
std::vector<char> boundary_cont_nodes(const Mesh2D &mesh, const ContLayout &lay)
{
  std::vector<char> on(static_cast<size_t>(lay.total()), 0);
  for (int e = 0; e < mesh.n_edges(); e++)
  {
    if (!mesh.edges[e].boundary)
      continue;
    on[static_cast<size_t>(lay.vertex(mesh.edges[e].v0))] = 1;
    on[static_cast<size_t>(lay.vertex(mesh.edges[e].v1))] = 1;
    for (int i = 1; i < lay.p; i++)
      on[static_cast<size_t>(lay.edge_node(e, i))] = 1;
  }
  return on;
}

template <typename Scalar>
struct RowAccum
{
  std::vector<std::pair<int64, Scalar>> entries;

  void add(int64 c, Scalar v) { entries.push_back({c, v}); }

  void flush(TripletBuffer<Scalar> &buf, int64 row)
  {
    std::sort(entries.begin(), entries.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (size_t k = 0; k < entries.size();)
    {
      Scalar s = entries[k].second;
      int64 c = entries[k].first;
      size_t j = k + 1;
      for (; j < entries.size() && entries[j].first == c; j++)
        s += entries[j].second;
      if (std::abs(s) > kDropTol)
        buf.add(row, c, s);
      k = j;
    }
    entries.clear();
  }
};

// Shared recipe body; `pin` marks continuous nodes forced to zero and
// `u_map(t)` returns the interior lifting rows of element t.
template <typename Scalar, typename UMap>
Csr<Scalar> recipe_impl(const Mesh2D &mesh, const RefData &ref, const std::vector<char> *pin,
                        UMap u_map)
{
  const int p = ref.p, m = ref.m;
  ContLayout lay = cont_layout(mesh, p);
  const int64 n_dofs = static_cast<int64>(mesh.n_edges()) * m;
  TripletBuffer<Scalar> buf(lay.total(), n_dofs);

  for (int v = 0; v < mesh.n_vertices(); v++)
  {
    if (pin && (*pin)[static_cast<size_t>(lay.vertex(v))])
      continue;
    const auto &inc = mesh.vertex_edges[v];
    if (inc.empty())
      throw std::logic_error("recipe_impl: isolated vertex");
    Scalar w(1.0 / static_cast<double>(inc.size()));
    for (auto [e, end] : inc)
      buf.add(lay.vertex(v), static_cast<int64>(e) * m + (end == 0 ? 0 : p), w);
  }
  for (int e = 0; e < mesh.n_edges(); e++)
    for (int i = 1; i < p; i++)
    {
      if (pin && (*pin)[static_cast<size_t>(lay.edge_node(e, i))])
        continue;
      Eigen::RowVectorXd chi = ref.sb.eval(static_cast<double>(i) / p);
      for (int a = 0; a < m; a++)
        if (std::abs(chi[a]) > kDropTol)
          buf.add(lay.edge_node(e, i), static_cast<int64>(e) * m + a, Scalar(chi[a]));
    }
  if (lay.per_tri > 0)
  {
    for (int t = 0; t < mesh.n_tris(); t++)
    {
      auto U = u_map(t);  // np x 3m
      int ordinal = 0;
      for (int node = 0; node < ref.np; node++)
      {
        if (ref.tb.node_location(node) != 6)
          continue;
        int64 row = lay.tri_node(t, ordinal++);
        RowAccum<Scalar> acc;
        for (int k = 0; k < 3; k++)
          for (int a = 0; a < m; a++)
          {
            Scalar v(U(node, k * m + a));
            if (std::abs(v) > kDropTol)
              acc.add(static_cast<int64>(mesh.tris[t].edge[k]) * m + a, v);
          }
        acc.flush(buf, row);
      }
    }
  }
  return buf.compress();
}

}  // namespace

ContLayout cont_layout(const Mesh2D &mesh, int p)
{
  ContLayout lay;
  lay.p = p;
  lay.nv = mesh.n_vertices();
  lay.ne = mesh.n_edges();
  lay.nt = mesh.n_tris();
  lay.per_edge = p - 1;
  lay.per_tri = (p - 1) * (p - 2) / 2;
  return lay;
}

CsrZ recipe_matrix(const HelmholtzAssembler &asmb)
{
  return recipe_impl<cplx>(asmb.mesh(), asmb.ref(), nullptr, [&](int t) {
    return helmholtz_local_u_map(asmb, t);
  });
}

CsrD recipe_matrix_zero_bc(const PoissonAssembler &asmb)
{
  std::vector<char> pin = boundary_cont_nodes(asmb.mesh(), cont_layout(asmb.mesh(), asmb.ref().p));
  return recipe_impl<double>(asmb.mesh(), asmb.ref(), &pin,
                             [&](int t) { return asmb.local_u_map(t); });
}

CsrD eval_matrix(const MeshHierarchy2D &hier, int l, int p)
{
  const Mesh2D &coarse = hier.meshes[static_cast<size_t>(l)];
  const Mesh2D &fine = hier.meshes[static_cast<size_t>(l) + 1];
  const int m = p + 1;
  ContLayout lay = cont_layout(coarse, p);
  TriBasis tb(p);
  SegBasis sb(p);
  TripletBuffer<double> buf(static_cast<int64>(fine.n_edges()) * m, lay.total());

  // Per-triangle inverse affine maps of the coarse mesh (two congruent shapes,
  // but recomputing per element keeps this general).
  for (int ef = 0; ef < fine.n_edges(); ef++)
  {
    EdgeAncestry anc = classify_fine_edge(hier, l, ef);
    for (int a = 0; a < m; a++)
    {
      int64 row = static_cast<int64>(ef) * m + a;
      Vec2 x = fine.edge_point(ef, sb.nodes()[a]);
      RowAccum<double> acc;
      if (anc.on_coarse_edge)
      {
        int ec = anc.coarse_id;
        Vec2 A = coarse.vertex[coarse.edges[ec].v0];
        Vec2 B = coarse.vertex[coarse.edges[ec].v1];
        Vec2 d = B - A;
        double sc = (x - A).dot(d) / d.dot(d);
        Eigen::RowVectorXd lat = lattice_basis_1d(p, sc);
        for (int i = 0; i <= p; i++)
        {
          if (std::abs(lat[i]) <= kDropTol)
            continue;
          int64 cn = i == 0   ? lay.vertex(coarse.edges[ec].v0)
                     : i == p ? lay.vertex(coarse.edges[ec].v1)
                              : lay.edge_node(ec, i);
          acc.add(cn, lat[i]);
        }
      }
      else
      {
        int tc = anc.coarse_id;
        Vec2 P0 = coarse.tri_vertex(tc, 0), P1 = coarse.tri_vertex(tc, 1),
             P2 = coarse.tri_vertex(tc, 2);
        double j00 = P1.x - P0.x, j01 = P2.x - P0.x, j10 = P1.y - P0.y, j11 = P2.y - P0.y;
        double det = j00 * j11 - j01 * j10;
        double xi = (j11 * (x.x - P0.x) - j01 * (x.y - P0.y)) / det;
        double eta = (-j10 * (x.x - P0.x) + j00 * (x.y - P0.y)) / det;
        Eigen::RowVectorXd phi = tb.eval(xi, eta);
        int ordinal = 0;
        for (int node = 0; node < tb.size(); node++)
        {
          int64 cn = lattice_to_cont(coarse, lay, tb, tc, node, ordinal);
          if (std::abs(phi[node]) > kDropTol)
            acc.add(cn, phi[node]);
        }
      }
      acc.flush(buf, row);
    }
  }
  return buf.compress();
}

namespace
{

template <typename Scalar>
Csr<Scalar> matmul_impl(const Csr<Scalar> &A, const Csr<Scalar> &B)
{
  if (A.n_cols != B.n_rows)
    throw std::invalid_argument("csr_matmul: dimension mismatch");
  Csr<Scalar> C;
  C.n_rows = A.n_rows;
  C.n_cols = B.n_cols;
  C.rowptr.assign(1, 0);
  std::vector<std::pair<int64, Scalar>> acc;
  for (int64 i = 0; i < A.n_rows; i++)
  {
    acc.clear();
    for (int64 ka = A.rowptr[i]; ka < A.rowptr[i + 1]; ka++)
    {
      int64 j = A.col[ka];
      Scalar av = A.val[ka];
      for (int64 kb = B.rowptr[j]; kb < B.rowptr[j + 1]; kb++)
        acc.push_back({B.col[kb], av * B.val[kb]});
    }
    std::sort(acc.begin(), acc.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (size_t k = 0; k < acc.size();)
    {
      Scalar s = acc[k].second;
      int64 c = acc[k].first;
      size_t j2 = k + 1;
      for (; j2 < acc.size() && acc[j2].first == c; j2++)
        s += acc[j2].second;
      if (std::abs(s) > kDropTol)
      {
        C.col.push_back(static_cast<int32>(c));
        C.val.push_back(s);
      }
      k = j2;
    }
    C.rowptr.push_back(static_cast<int64>(C.col.size()));
  }
  return C;
}

}  // namespace

CsrZ csr_matmul(const CsrZ &A, const CsrZ &B)
{
  return matmul_impl(A, B);
}

CsrD csr_matmul(const CsrD &A, const CsrD &B)
{
  return matmul_impl(A, B);
}

CsrZ csr_from_real(const CsrD &A)
{
  CsrZ B;
  B.n_rows = A.n_rows;
  B.n_cols = A.n_cols;
  B.rowptr = A.rowptr;
  B.col = A.col;
  B.val.assign(A.val.begin(), A.val.end());
  return B;
}

CsrZ csr_identity(int64 n)
{
  CsrZ I;
  I.n_rows = I.n_cols = n;
  I.rowptr.resize(n + 1);
  I.col.resize(n);
  I.val.assign(n, cplx(1.0, 0.0));
  for (int64 i = 0; i < n; i++)
  {
    I.rowptr[i + 1] = i + 1;
    I.col[i] = static_cast<int32>(i);
  }
  I.rowptr[0] = 0;
  return I;
}

void csr_apply(const CsrZ &A, const cplx *x, cplx *y)
{
  for (int64 i = 0; i < A.n_rows; i++)
  {
    cplx acc(0.0, 0.0);
    for (int64 k = A.rowptr[i]; k < A.rowptr[i + 1]; k++)
      acc += A.val[k] * x[A.col[k]];
    y[i] = acc;
  }
}

void csr_apply_adjoint(const CsrZ &A, const cplx *x, cplx *y)
{
  std::fill(y, y + A.n_cols, cplx(0.0, 0.0));
  for (int64 i = 0; i < A.n_rows; i++)
    for (int64 k = A.rowptr[i]; k < A.rowptr[i + 1]; k++)
      y[A.col[k]] += std::conj(A.val[k]) * x[i];
}

std::vector<CsrZ> build_transfer(const MeshHierarchy2D &hier,
                                 const std::vector<const HelmholtzAssembler *> &levels)
{
  std::vector<CsrZ> P;
  for (int l = 0; l < hier.L(); l++)
  {
    CsrZ R = recipe_matrix(*levels[static_cast<size_t>(l)]);
    CsrZ E = csr_from_real(eval_matrix(hier, l, levels[static_cast<size_t>(l)]->ref().p));
    P.push_back(csr_matmul(E, R));
  }
  return P;
}

std::vector<CsrD> build_transfer_zero_bc(const MeshHierarchy2D &hier,
                                         const std::vector<const PoissonAssembler *> &levels)
{
  std::vector<CsrD> P;
  for (int l = 0; l < hier.L(); l++)
  {
    const PoissonAssembler &ca = *levels[static_cast<size_t>(l)];
    const PoissonAssembler &fa = *levels[static_cast<size_t>(l) + 1];
    CsrD full = csr_matmul(eval_matrix(hier, l, ca.ref().p), recipe_matrix_zero_bc(ca));
    // Restrict to the interior dofs on both levels.
    CsrD red;
    red.n_rows = fa.n_reduced();
    red.n_cols = ca.n_reduced();
    red.rowptr.assign(static_cast<size_t>(red.n_rows) + 1, 0);
    std::vector<std::vector<std::pair<int32, double>>> rows(static_cast<size_t>(red.n_rows));
    for (int64 rf = 0; rf < full.n_rows; rf++)
    {
      int ri = fa.reduced_index(rf);
      if (ri < 0)
        continue;
      for (int64 k = full.rowptr[rf]; k < full.rowptr[rf + 1]; k++)
      {
        int ci = ca.reduced_index(full.col[k]);
        if (ci < 0)
          throw std::logic_error("build_transfer_zero_bc: boundary column not pinned");
        rows[static_cast<size_t>(ri)].push_back({static_cast<int32>(ci), full.val[k]});
      }
    }
    for (size_t i = 0; i < rows.size(); i++)
    {
      std::sort(rows[i].begin(), rows[i].end());
      for (auto &[c, v] : rows[i])
      {
        red.col.push_back(c);
        red.val.push_back(v);
      }
      red.rowptr[i + 1] = static_cast<int64>(red.col.size());
    }
    P.push_back(std::move(red));
  }
  return P;
}

double energy_stability_ratio(const PoissonAssembler &coarse, const PoissonAssembler &fine,
                              const CsrD &P_reduced)
{
  Eigen::SparseMatrix<double> Ac = coarse.assemble0();
  Eigen::SparseMatrix<double> Af = fine.assemble0();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ac);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("energy_stability_ratio: coarse factorization failed");

  const int64 nc = P_reduced.n_cols, nf = P_reduced.n_rows;
  auto apply_B = [&](const Eigen::VectorXd &mu) {
    Eigen::VectorXd pf = Eigen::VectorXd::Zero(nf);
    for (int64 i = 0; i < nf; i++)
      for (int64 k = P_reduced.rowptr[i]; k < P_reduced.rowptr[i + 1]; k++)
        pf[i] += P_reduced.val[k] * mu[P_reduced.col[k]];
    Eigen::VectorXd af = Af * pf;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nc);
    for (int64 i = 0; i < nf; i++)
      for (int64 k = P_reduced.rowptr[i]; k < P_reduced.rowptr[i + 1]; k++)
        out[P_reduced.col[k]] += P_reduced.val[k] * af[i];
    return out;
  };

  // Power iteration on Ac^-1 B for the largest generalized eigenvalue.
  Eigen::VectorXd mu(nc);
  for (int64 i = 0; i < nc; i++)
    mu[i] = 1.0 + 0.01 * static_cast<double>((i * 2654435761LL) % 97);
  mu.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 500; it++)
  {
    Eigen::VectorXd b = apply_B(mu);
    double num = mu.dot(b);
    Eigen::VectorXd amu = Ac * mu;
    double den = mu.dot(amu);
    double next = num / den;
    Eigen::VectorXd w = ldlt.solve(b);
    double nw = w.norm();
    if (nw == 0.0)
      return 0.0;
    mu = w / nw;
    if (it > 10 && std::abs(next - lambda) <= 1e-12 * std::abs(next))
    {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace hdgmg
