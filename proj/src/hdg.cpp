// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/hdg.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hdgmg
{

namespace
{

constexpr cplx iunit(0.0, 1.0);

struct ElementGeometry
{
  Vec2 P[3];
  double J[2][2], Jinv[2][2], detJ;
  double len[3], nx[3], ny[3];
  int sign[3];
  bool lower;  // parity of the triangle within its cell

  ElementGeometry(const Mesh2D &mesh, int t)
  {
    const Tri2D &tri = mesh.tris[t];
    for (int k = 0; k < 3; k++)
    {
      P[k] = mesh.vertex[tri.v[k]];
      sign[k] = tri.sign[k];
    }
    J[0][0] = P[1].x - P[0].x;
    J[0][1] = P[2].x - P[0].x;
    J[1][0] = P[1].y - P[0].y;
    J[1][1] = P[2].y - P[0].y;
    detJ = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    Jinv[0][0] = J[1][1] / detJ;
    Jinv[0][1] = -J[0][1] / detJ;
    Jinv[1][0] = -J[1][0] / detJ;
    Jinv[1][1] = J[0][0] / detJ;
    Vec2 centroid{(P[0].x + P[1].x + P[2].x) / 3.0, (P[0].y + P[1].y + P[2].y) / 3.0};
    const int ea[3] = {0, 1, 0}, eb[3] = {1, 2, 2};
    for (int k = 0; k < 3; k++)
    {
      Vec2 a = P[ea[k]], b = P[eb[k]];
      Vec2 tvec{b.x - a.x, b.y - a.y};
      len[k] = tvec.norm();
      double cx = tvec.y / len[k], cy = -tvec.x / len[k];
      Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      if (cx * (centroid.x - mid.x) + cy * (centroid.y - mid.y) > 0.0)
      {
        cx = -cx;
        cy = -cy;
      }
      nx[k] = cx;
      ny[k] = cy;
    }
    lower = t % 2 == 0;
  }

  Vec2 edge_phys(int k, double s) const
  {
    const int ea[3] = {0, 1, 0}, eb[3] = {1, 2, 2};
    const Vec2 &a = P[ea[k]], &b = P[eb[k]];
    return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
  }
};

std::shared_ptr<LocalOps> build_local_ops(const RefData &ref, const ElementGeometry &geo,
                                          double tau, cplx c_q, cplx c_u, int element_id)
{
  const int np = ref.np, m = ref.m, nq = static_cast<int>(ref.tq.w.size()),
            nq1 = static_cast<int>(ref.q1.w.size());
  auto ops = std::make_shared<LocalOps>();
  ops->np = np;
  ops->m = m;
  ops->tau = tau;
  ops->hT = *std::max_element(geo.len, geo.len + 3);

  // Volume matrices on the physical element.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd Dy = Eigen::MatrixXd::Zero(np, np);
  for (int q = 0; q < nq; q++)
  {
    double w = ref.tq.w[q] * geo.detJ;
    Eigen::RowVectorXd phi = ref.Phi.row(q);
    Eigen::RowVectorXd gx =
        geo.Jinv[0][0] * ref.Gxi.row(q) + geo.Jinv[1][0] * ref.Geta.row(q);
    Eigen::RowVectorXd gy =
        geo.Jinv[0][1] * ref.Gxi.row(q) + geo.Jinv[1][1] * ref.Geta.row(q);
    M += w * phi.transpose() * phi;
    Dx += w * gx.transpose() * phi;
    Dy += w * gy.transpose() * phi;
  }

  // Element-boundary matrices: per-edge trace moments and boundary masses.
  Eigen::MatrixXd Eb = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd Cnx = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd Cny = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd C0 = Eigen::MatrixXd::Zero(np, 3 * m);
  Eigen::MatrixXd Cx = Eigen::MatrixXd::Zero(np, 3 * m);
  Eigen::MatrixXd Cy = Eigen::MatrixXd::Zero(np, 3 * m);
  for (int k = 0; k < 3; k++)
  {
    const Eigen::MatrixXd &chi = geo.sign[k] > 0 ? ref.seg_fwd : ref.seg_rev;
    for (int q = 0; q < nq1; q++)
    {
      double w = ref.q1.w[q] * geo.len[k];
      Eigen::RowVectorXd phi = ref.edge_phi[k].row(q);
      Eb += w * phi.transpose() * phi;
      Cnx += w * geo.nx[k] * phi.transpose() * phi;
      Cny += w * geo.ny[k] * phi.transpose() * phi;
      C0.block(0, k * m, np, m) += w * phi.transpose() * chi.row(q);
      Cx.block(0, k * m, np, m) += w * geo.nx[k] * phi.transpose() * chi.row(q);
      Cy.block(0, k * m, np, m) += w * geo.ny[k] * phi.transpose() * chi.row(q);
    }
  }

  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(3 * np, 3 * np);
  K.block(0, 0, np, np) = c_q * M;
  K.block(np, np, np, np) = c_q * M;
  K.block(0, 2 * np, np, np) = -Dx;
  K.block(np, 2 * np, np, np) = -Dy;
  K.block(2 * np, 0, np, np) = -Dx + Cnx;
  K.block(2 * np, np, np, np) = -Dy + Cny;
  K.block(2 * np, 2 * np, np, np) = c_u * M + tau * Eb;

  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(3 * np, 3 * m);
  B.block(0, 0, np, 3 * m) = -Cx;
  B.block(np, 0, np, 3 * m) = -Cy;
  B.block(2 * np, 0, np, 3 * m) = tau * C0;

  ops->luK.compute(K);
  // Guard against a singular local saddle system.
  Eigen::VectorXd du = ops->luK.matrixLU().diagonal().cwiseAbs();
  if (du.minCoeff() <= 1e-14 * du.maxCoeff())
    throw std::runtime_error("build_local_ops: singular local matrix on element " +
                             std::to_string(element_id) + " (tau = " + std::to_string(tau) +
                             ")");

  ops->K = K;
  ops->B = B;
  ops->Z = ops->luK.solve(B);
  ops->G = Eigen::MatrixXcd::Zero(3 * m, 3 * np);
  ops->G.block(0, 0, 3 * m, np) = Cx.transpose().cast<cplx>();
  ops->G.block(0, np, 3 * m, np) = Cy.transpose().cast<cplx>();
  ops->G.block(0, 2 * np, 3 * m, np) = tau * C0.transpose().cast<cplx>();
  ops->L = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  for (int k = 0; k < 3; k++)
    ops->L.block(k * m, k * m, m, m) = tau * geo.len[k] * ref.Mseg;
  ops->AT = ops->L.cast<cplx>() - ops->G * ops->Z;
  ops->M = M;
  for (int k = 0; k < 3; k++)
  {
    ops->cross0[k] = C0.block(0, k * m, np, m);
    ops->len[k] = geo.len[k];
  }
  return ops;
}

// Gather the local trace coefficients of element t from a global vector.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gather_trace(const Mesh2D &mesh, int t, int m,
                                                      const std::vector<Scalar> &lambda)
{
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> loc(3 * m);
  for (int k = 0; k < 3; k++)
    for (int a = 0; a < m; a++)
      loc[k * m + a] = lambda[static_cast<size_t>(mesh.tris[t].edge[k]) * m + a];
  return loc;
}

}  // namespace

double HelmholtzProblem::kappa_max() const
{
  double k = 0.0;
  for (double v : kappa_by_region)
    k = std::max(k, v);
  return k;
}

RefData::RefData(int p)
  : p(p), np((p + 1) * (p + 2) / 2), m(p + 1), tb(p), sb(p), tq(triangle_rule(p + 3)),
    q1(gauss_legendre(p + 3))
{
  const int nq = static_cast<int>(tq.w.size()), nq1 = static_cast<int>(q1.w.size());
  Phi.resize(nq, np);
  Gxi.resize(nq, np);
  Geta.resize(nq, np);
  for (int q = 0; q < nq; q++)
  {
    Phi.row(q) = tb.eval(tq.x[q], tq.y[q]);
    Eigen::RowVectorXd gx, gy;
    tb.grad(tq.x[q], tq.y[q], gx, gy);
    Gxi.row(q) = gx;
    Geta.row(q) = gy;
  }
  seg_fwd.resize(nq1, m);
  seg_rev.resize(nq1, m);
  for (int q = 0; q < nq1; q++)
  {
    seg_fwd.row(q) = sb.eval(q1.x[q]);
    seg_rev.row(q) = sb.eval(1.0 - q1.x[q]);
  }
  // Local edge parameterizations on the reference triangle.
  for (int k = 0; k < 3; k++)
  {
    edge_phi[k].resize(nq1, np);
    for (int q = 0; q < nq1; q++)
    {
      double s = q1.x[q], x, y;
      if (k == 0)
      {
        x = s;
        y = 0.0;
      }
      else if (k == 1)
      {
        x = 1.0 - s;
        y = s;
      }
      else
      {
        x = 0.0;
        y = s;
      }
      edge_phi[k].row(q) = tb.eval(x, y);
    }
  }
  Mseg = Eigen::MatrixXd::Zero(m, m);
  for (int q = 0; q < nq1; q++)
    Mseg += q1.w[q] * seg_fwd.row(q).transpose() * seg_fwd.row(q);
}

void SkeletonSystem::apply_mass(const cplx *x, cplx *y) const
{
  const int m = p + 1;
  for (size_t e = 0; e < mass_weight.size(); e++)
  {
    for (int i = 0; i < m; i++)
    {
      cplx acc(0.0, 0.0);
      for (int j = 0; j < m; j++)
        acc += Mseg(i, j) * x[e * m + j];
      y[e * m + i] = mass_weight[e] * acc;
    }
  }
}

void SkeletonSystem::solve_mass(const cplx *x, cplx *y) const
{
  const int m = p + 1;
  for (size_t e = 0; e < mass_weight.size(); e++)
  {
    for (int i = 0; i < m; i++)
    {
      cplx acc(0.0, 0.0);
      for (int j = 0; j < m; j++)
        acc += Mseg_inv(i, j) * x[e * m + j];
      y[e * m + i] = acc / mass_weight[e];
    }
  }
}

cplx SkeletonSystem::mass_dot(const VecZ &v, const VecZ &w) const
{
  const int m = p + 1;
  cplx acc(0.0, 0.0);
  for (size_t e = 0; e < mass_weight.size(); e++)
    for (int i = 0; i < m; i++)
      for (int j = 0; j < m; j++)
        acc += mass_weight[e] * Mseg(i, j) * v[e * m + j] * std::conj(w[e * m + i]);
  return acc;
}

HelmholtzAssembler::HelmholtzAssembler(const Mesh2D &mesh, HelmholtzProblem prob)
  : mesh_(mesh), prob_(std::move(prob)), ref_(std::make_shared<RefData>(prob_.p))
{
  // Congruent elements (same cell parity, same kappa) share local operators.
  std::map<std::pair<int, int>, std::shared_ptr<LocalOps>> cache;
  ops_.resize(mesh_.n_tris());
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    int region = mesh_.tris[t].region;
    std::pair<int, int> key(t % 2, region);
    auto it = cache.find(key);
    if (it == cache.end())
    {
      ElementGeometry geo(mesh_, t);
      double kappa = prob_.kappa_of(region);
      double hT = std::sqrt(2.0) * mesh_.h();
      double tau = prob_.p / (kappa * hT);
      it = cache
               .emplace(key, build_local_ops(*ref_, geo, tau, iunit * kappa, iunit * kappa, t))
               .first;
    }
    ops_[t] = it->second;
  }
}

const LocalOps &HelmholtzAssembler::local_ops(int t) const
{
  return *ops_[t];
}

Eigen::VectorXcd HelmholtzAssembler::f_moments(int t) const
{
  const int np = ref_->np, nq = static_cast<int>(ref_->tq.w.size());
  ElementGeometry geo(mesh_, t);
  Eigen::VectorXcd Fw = Eigen::VectorXcd::Zero(np);
  for (int q = 0; q < nq; q++)
  {
    Vec2 x = mesh_.map_to_physical(t, ref_->tq.x[q], ref_->tq.y[q]);
    cplx fv = prob_.f(x);
    double w = ref_->tq.w[q] * geo.detJ;
    for (int i = 0; i < np; i++)
      Fw[i] += w * fv * ref_->Phi(q, i);
  }
  return Fw;
}

Eigen::VectorXcd HelmholtzAssembler::local_solve(int t, const VecZ &lambda) const
{
  const LocalOps &op = *ops_[t];
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(3 * op.np);
  rhs.segment(2 * op.np, op.np) = f_moments(t);
  return op.Z * gather_trace(mesh_, t, op.m, lambda) + op.luK.solve(rhs);
}

SkeletonSystem HelmholtzAssembler::assemble() const
{
  const int m = ref_->m;
  SkeletonSystem sys;
  sys.level = mesh_.level;
  sys.p = prob_.p;
  sys.n = mesh_.n;
  sys.n_dofs = static_cast<int64>(mesh_.n_edges()) * m;
  sys.Mseg = ref_->Mseg;
  sys.Mseg_inv = ref_->Mseg.inverse();
  sys.mass_weight.resize(mesh_.n_edges());
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    int mult = mesh_.edges[e].boundary ? 1 : 2;
    sys.mass_weight[e] = mult * mesh_.edge_length(e);
  }

  TripletBuffer<cplx> buf(sys.n_dofs, sys.n_dofs);
  sys.Fhat.assign(sys.n_dofs, cplx(0.0, 0.0));
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    const LocalOps &op = *ops_[t];
    const Tri2D &tri = mesh_.tris[t];
    for (int ka = 0; ka < 3; ka++)
      for (int a = 0; a < m; a++)
      {
        int64 row = static_cast<int64>(tri.edge[ka]) * m + a;
        for (int kb = 0; kb < 3; kb++)
          for (int b = 0; b < m; b++)
            buf.add(row, static_cast<int64>(tri.edge[kb]) * m + b,
                    op.AT(ka * m + a, kb * m + b));
      }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(3 * op.np);
    rhs.segment(2 * op.np, op.np) = f_moments(t);
    Eigen::VectorXcd bloc = op.G * op.luK.solve(rhs);
    for (int k = 0; k < 3; k++)
      for (int a = 0; a < m; a++)
        sys.Fhat[static_cast<size_t>(tri.edge[k]) * m + a] += bloc[k * m + a];
  }
  const int nq1 = static_cast<int>(ref_->q1.w.size());
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    if (!mesh_.edges[e].boundary)
      continue;
    double le = mesh_.edge_length(e);
    for (int a = 0; a < m; a++)
      for (int b = 0; b < m; b++)
        buf.add(static_cast<int64>(e) * m + a, static_cast<int64>(e) * m + b,
                le * ref_->Mseg(a, b));
    for (int q = 0; q < nq1; q++)
    {
      cplx gv = prob_.g(mesh_.edge_point(e, ref_->q1.x[q]));
      double w = ref_->q1.w[q] * le;
      for (int a = 0; a < m; a++)
        sys.Fhat[static_cast<size_t>(e) * m + a] += w * gv * ref_->seg_fwd(q, a);
    }
  }
  sys.Ahat = buf.compress();

  // Operator form A = M^-1 Ahat: scale each edge block of rows by
  // Mseg_inv / weight, merging the block's column patterns.
  sys.A.n_rows = sys.A.n_cols = sys.n_dofs;
  sys.A.rowptr.assign(1, 0);
  sys.A.col.clear();
  sys.A.val.clear();
  std::vector<int32> cols;
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    cols.clear();
    for (int i = 0; i < m; i++)
    {
      int64 r = static_cast<int64>(e) * m + i;
      for (int64 k = sys.Ahat.rowptr[r]; k < sys.Ahat.rowptr[r + 1]; k++)
        cols.push_back(sys.Ahat.col[k]);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    const int nc = static_cast<int>(cols.size());
    Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(m, nc);
    for (int i = 0; i < m; i++)
    {
      int64 r = static_cast<int64>(e) * m + i;
      for (int64 k = sys.Ahat.rowptr[r]; k < sys.Ahat.rowptr[r + 1]; k++)
      {
        int idx = static_cast<int>(
            std::lower_bound(cols.begin(), cols.end(), sys.Ahat.col[k]) - cols.begin());
        blk(i, idx) = sys.Ahat.val[k];
      }
    }
    Eigen::MatrixXcd scaled = (sys.Mseg_inv / sys.mass_weight[e]) * blk;
    for (int i = 0; i < m; i++)
    {
      for (int idx = 0; idx < nc; idx++)
      {
        sys.A.col.push_back(cols[idx]);
        sys.A.val.push_back(scaled(i, idx));
      }
      sys.A.rowptr.push_back(static_cast<int64>(sys.A.col.size()));
    }
  }

  sys.F.resize(sys.n_dofs);
  sys.solve_mass(sys.Fhat.data(), sys.F.data());
  sys.diag.assign(sys.n_dofs, cplx(0.0, 0.0));
  for (int64 r = 0; r < sys.n_dofs; r++)
    for (int64 k = sys.A.rowptr[r]; k < sys.A.rowptr[r + 1]; k++)
      if (sys.A.col[k] == r)
        sys.diag[r] = sys.A.val[k];
  return sys;
}

InteriorFields HelmholtzAssembler::recover_interior(const VecZ &lambda) const
{
  if (static_cast<int64>(lambda.size()) != static_cast<int64>(mesh_.n_edges()) * ref_->m)
    throw std::invalid_argument("recover_interior: dimension mismatch");
  InteriorFields fields;
  fields.p = prob_.p;
  fields.np = ref_->np;
  fields.z.resize(mesh_.n_tris());
  for (int t = 0; t < mesh_.n_tris(); t++)
    fields.z[t] = local_solve(t, lambda);
  return fields;
}

double HelmholtzAssembler::local_residual(int t, const VecZ &lambda) const
{
  const LocalOps &op = *ops_[t];
  Eigen::VectorXcd loc = gather_trace(mesh_, t, op.m, lambda);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(3 * op.np);
  rhs.segment(2 * op.np, op.np) = f_moments(t);
  Eigen::VectorXcd z = op.Z * loc + op.luK.solve(rhs);
  Eigen::VectorXcd res = op.K * z - op.B * loc - rhs;
  double scale = (op.B * loc).norm() + rhs.norm();
  return res.norm() / std::max(scale, 1e-300);
}

Eigen::VectorXcd HelmholtzAssembler::flux_moments(int t, const VecZ &lambda,
                                                  const InteriorFields &fields) const
{
  const LocalOps &op = *ops_[t];
  return op.G * fields.z[t] - op.L.cast<cplx>() * gather_trace(mesh_, t, op.m, lambda);
}

VecZ HelmholtzAssembler::solve_full_trace() const
{
  const int np = ref_->np, m = ref_->m;
  const int64 nz = static_cast<int64>(mesh_.n_tris()) * 3 * np;
  const int64 nd = static_cast<int64>(mesh_.n_edges()) * m;
  const int64 N = nz + nd;
  std::vector<Eigen::Triplet<cplx>> trips;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);

  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    const LocalOps &op = *ops_[t];
    const Tri2D &tri = mesh_.tris[t];
    int64 r0 = static_cast<int64>(t) * 3 * np;
    for (int i = 0; i < 3 * np; i++)
      for (int j = 0; j < 3 * np; j++)
        if (op.K(i, j) != cplx(0.0, 0.0))
          trips.emplace_back(r0 + i, r0 + j, op.K(i, j));
    for (int i = 0; i < 3 * np; i++)
      for (int k = 0; k < 3; k++)
        for (int a = 0; a < m; a++)
        {
          cplx v = op.B(i, k * m + a);
          if (v != cplx(0.0, 0.0))
            trips.emplace_back(r0 + i, nz + static_cast<int64>(tri.edge[k]) * m + a, -v);
        }
    Eigen::VectorXcd Fw = f_moments(t);
    rhs.segment(r0 + 2 * np, np) = Fw;

    // Transmission/boundary rows: flux moments of this element.
    for (int k = 0; k < 3; k++)
    {
      int e = tri.edge[k];
      double sgn = mesh_.edges[e].boundary ? -1.0 : 1.0;
      for (int a = 0; a < m; a++)
      {
        int64 row = nz + static_cast<int64>(e) * m + a;
        for (int j = 0; j < 3 * np; j++)
        {
          cplx v = op.G(k * m + a, j);
          if (v != cplx(0.0, 0.0))
            trips.emplace_back(row, r0 + j, sgn * v);
        }
        for (int b = 0; b < m; b++)
        {
          double v = op.L(k * m + a, k * m + b);
          if (v != 0.0)
            trips.emplace_back(row, nz + static_cast<int64>(e) * m + b, -sgn * v);
        }
      }
    }
  }
  const int nq1 = static_cast<int>(ref_->q1.w.size());
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    if (!mesh_.edges[e].boundary)
      continue;
    double le = mesh_.edge_length(e);
    for (int a = 0; a < m; a++)
    {
      int64 row = nz + static_cast<int64>(e) * m + a;
      for (int b = 0; b < m; b++)
        trips.emplace_back(row, nz + static_cast<int64>(e) * m + b, le * ref_->Mseg(a, b));
      for (int q = 0; q < nq1; q++)
        rhs[row] += ref_->q1.w[q] * le * prob_.g(mesh_.edge_point(e, ref_->q1.x[q])) *
                    ref_->seg_fwd(q, a);
    }
  }

  Eigen::SparseMatrix<cplx> mat(N, N);
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_full_trace: factorization failed");
  Eigen::VectorXcd sol = lu.solve(rhs);
  VecZ lambda(nd);
  for (int64 i = 0; i < nd; i++)
    lambda[i] = sol[nz + i];
  return lambda;
}

double HelmholtzAssembler::trace_error(const VecZ &lambda,
                                       const std::function<cplx(const Vec2 &)> &exact) const
{
  const int m = ref_->m;
  QuadRule1D rule = gauss_legendre(std::max(prob_.p + 3, 6));
  double acc = 0.0;
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    double le = mesh_.edge_length(e);
    for (size_t q = 0; q < rule.w.size(); q++)
    {
      Eigen::RowVectorXd chi = ref_->sb.eval(rule.x[q]);
      cplx uh(0.0, 0.0);
      for (int a = 0; a < m; a++)
        uh += chi[a] * lambda[static_cast<size_t>(e) * m + a];
      cplx diff = uh - exact(mesh_.edge_point(e, rule.x[q]));
      acc += rule.w[q] * le * std::norm(diff);
    }
  }
  return std::sqrt(acc);
}

double HelmholtzAssembler::volume_error(const InteriorFields &fields,
                                        const std::function<cplx(const Vec2 &)> &exact) const
{
  const int np = ref_->np;
  QuadRuleTri rule = triangle_rule(std::max(prob_.p + 3, 6));
  double acc = 0.0;
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    ElementGeometry geo(mesh_, t);
    for (size_t q = 0; q < rule.w.size(); q++)
    {
      Eigen::RowVectorXd phi = ref_->tb.eval(rule.x[q], rule.y[q]);
      cplx uh(0.0, 0.0);
      for (int i = 0; i < np; i++)
        uh += phi[i] * fields.z[t][2 * np + i];
      cplx diff = uh - exact(mesh_.map_to_physical(t, rule.x[q], rule.y[q]));
      acc += rule.w[q] * geo.detJ * std::norm(diff);
    }
  }
  return std::sqrt(acc);
}

VecZ HelmholtzAssembler::trace_of(const std::function<cplx(const Vec2 &)> &fn) const
{
  const int m = ref_->m;
  VecZ lambda(static_cast<size_t>(mesh_.n_edges()) * m);
  for (int e = 0; e < mesh_.n_edges(); e++)
    for (int a = 0; a < m; a++)
      lambda[static_cast<size_t>(e) * m + a] = fn(mesh_.edge_point(e, ref_->sb.nodes()[a]));
  return lambda;
}

PoissonAssembler::PoissonAssembler(const Mesh2D &mesh, int p, double c)
  : mesh_(mesh), p_(p), c_(c), ref_(std::make_shared<RefData>(p))
{
  std::map<int, std::shared_ptr<LocalOps>> cache;
  ops_.resize(mesh_.n_tris());
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    int key = t % 2;
    auto it = cache.find(key);
    if (it == cache.end())
    {
      ElementGeometry geo(mesh_, t);
      double tau = c_ / (std::sqrt(2.0) * mesh_.h());
      it = cache.emplace(key, build_local_ops(*ref_, geo, tau, cplx(1.0, 0.0),
                                              cplx(0.0, 0.0), t))
               .first;
    }
    ops_[t] = it->second;
  }
  red_.assign(static_cast<size_t>(mesh_.n_edges()) * ref_->m, -1);
  n_red_ = 0;
  for (int e = 0; e < mesh_.n_edges(); e++)
  {
    if (mesh_.edges[e].boundary)
      continue;
    for (int a = 0; a < ref_->m; a++)
      red_[static_cast<size_t>(e) * ref_->m + a] = n_red_++;
  }
}

Eigen::SparseMatrix<double> PoissonAssembler::assemble0() const
{
  const int m = ref_->m;
  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    const LocalOps &op = *ops_[t];
    const Tri2D &tri = mesh_.tris[t];
    for (int ka = 0; ka < 3; ka++)
      for (int a = 0; a < m; a++)
      {
        int ra = red_[static_cast<size_t>(tri.edge[ka]) * m + a];
        if (ra < 0)
          continue;
        for (int kb = 0; kb < 3; kb++)
          for (int b = 0; b < m; b++)
          {
            int rb = red_[static_cast<size_t>(tri.edge[kb]) * m + b];
            if (rb < 0)
              continue;
            trips.emplace_back(ra, rb, op.AT(ka * m + a, kb * m + b).real());
          }
      }
  }
  Eigen::SparseMatrix<double> A(n_red_, n_red_);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

std::vector<Eigen::VectorXd> PoissonAssembler::recover(const VecD &lambda) const
{
  std::vector<Eigen::VectorXd> z(mesh_.n_tris());
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    const LocalOps &op = *ops_[t];
    z[t] = (op.Z * gather_trace(mesh_, t, op.m, lambda).cast<cplx>()).real();
  }
  return z;
}

double PoissonAssembler::energy(const VecD &lambda) const
{
  const int np = ref_->np, m = ref_->m;
  double acc = 0.0;
  for (int t = 0; t < mesh_.n_tris(); t++)
  {
    const LocalOps &op = *ops_[t];
    Eigen::VectorXd loc = gather_trace(mesh_, t, m, lambda);
    Eigen::VectorXd z = (op.Z * loc.cast<cplx>()).real();
    Eigen::VectorXd qx = z.segment(0, np), qy = z.segment(np, np), u = z.segment(2 * np, np);
    acc += qx.dot(op.M * qx) + qy.dot(op.M * qy);
    for (int k = 0; k < 3; k++)
    {
      // int_e (U - lambda)^2 with the edge's own trace block.
      Eigen::VectorXd lam = loc.segment(k * m, m);
      double uu = 0.0;
      const int nq1 = static_cast<int>(ref_->q1.w.size());
      const Eigen::MatrixXd &chi =
          mesh_.tris[t].sign[k] > 0 ? ref_->seg_fwd : ref_->seg_rev;
      for (int q = 0; q < nq1; q++)
      {
        double uval = ref_->edge_phi[k].row(q).dot(u);
        double lval = chi.row(q).dot(lam);
        uu += ref_->q1.w[q] * op.len[k] * (uval - lval) * (uval - lval);
      }
      acc += op.tau * uu;
    }
  }
  return acc;
}

Eigen::MatrixXd PoissonAssembler::local_u_map(int t) const
{
  const LocalOps &op = *ops_[t];
  return op.Z.block(2 * op.np, 0, op.np, 3 * op.m).real();
}

Eigen::MatrixXcd helmholtz_local_u_map(const HelmholtzAssembler &asmb, int t)
{
  const LocalOps &op = asmb.local_ops(t);
  return op.Z.block(2 * op.np, 0, op.np, 3 * op.m);
}

}  // namespace hdgmg
