// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hdgmg
{

namespace
{

// Per-vertex slot table: the up-to-three edges whose min vertex is v, in
// lexicographic (vmin, vmax) order: horizontal, vertical, diagonal.
struct EdgeSlots
{
  std::vector<std::array<int, 3>> slot;

  int get(int v, int kind) const { return slot[v][kind]; }
};

}  // namespace

double Mesh2D::edge_length(int e) const
{
  return (vertex[edges[e].v1] - vertex[edges[e].v0]).norm();
}

Vec2 Mesh2D::edge_point(int e, double s) const
{
  const Vec2 &a = vertex[edges[e].v0];
  const Vec2 &b = vertex[edges[e].v1];
  return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

Vec2 Mesh2D::map_to_physical(int t, double xi, double eta) const
{
  const Vec2 &p0 = vertex[tris[t].v[0]];
  const Vec2 &p1 = vertex[tris[t].v[1]];
  const Vec2 &p2 = vertex[tris[t].v[2]];
  return {p0.x + xi * (p1.x - p0.x) + eta * (p2.x - p0.x),
          p0.y + xi * (p1.y - p0.y) + eta * (p2.y - p0.y)};
}

void Mesh2D::locate(const Vec2 &p, int &t, double &xi, double &eta) const
{
  const double hc = h();
  double gx = (p.x - x0) / hc, gy = (p.y - y0) / hc;
  int ix = std::clamp(static_cast<int>(std::floor(gx)), 0, n - 1);
  int iy = std::clamp(static_cast<int>(std::floor(gy)), 0, n - 1);
  double fx = gx - ix, fy = gy - iy;
  // Nudge points sitting on cell lines into the clamped cell.
  fx = std::clamp(fx, 0.0, 1.0);
  fy = std::clamp(fy, 0.0, 1.0);
  const double tol = 1e-12;
  int cell = iy * n + ix;
  if (fy <= fx + tol)
  {
    t = 2 * cell;  // lower triangle (bl, br, tr)
    eta = fy;
    xi = fx - fy;
  }
  else
  {
    t = 2 * cell + 1;  // upper triangle (bl, tr, tl)
    xi = fx;
    eta = fy - fx;
  }
}

void Mesh2D::set_regions(const std::vector<int> &labels)
{
  if (static_cast<int>(labels.size()) != n_tris())
    throw std::invalid_argument("set_regions: label count mismatch");
  for (int t = 0; t < n_tris(); t++)
    tris[t].region = labels[t];
}

Mesh2D build_mesh_2d(int n, int level, double x0, double y0, double extent)
{
  if (n < 1)
    throw std::invalid_argument("build_mesh_2d: n must be >= 1");
  Mesh2D m;
  m.n = n;
  m.level = level;
  m.x0 = x0;
  m.y0 = y0;
  m.extent = extent;
  const double h = m.h();

  m.vertex.resize(m.n_vertices());
  for (int iy = 0; iy <= n; iy++)
    for (int ix = 0; ix <= n; ix++)
      m.vertex[m.vertex_id(ix, iy)] = {x0 + ix * h, y0 + iy * h};

  // Edges in lexicographic (vmin, vmax) order.  For a given vmin the sorted
  // partners are vmin+1 (horizontal), vmin+n+1 (vertical), vmin+n+2 (diagonal).
  EdgeSlots slots;
  slots.slot.assign(m.n_vertices(), {-1, -1, -1});
  m.edges.reserve(m.n_edges());
  for (int iy = 0; iy <= n; iy++)
    for (int ix = 0; ix <= n; ix++)
    {
      int v = m.vertex_id(ix, iy);
      if (ix < n)
      {
        slots.slot[v][0] = static_cast<int>(m.edges.size());
        Edge2D e;
        e.v0 = v;
        e.v1 = v + 1;
        e.boundary = (iy == 0 || iy == n);
        m.edges.push_back(e);
      }
      if (iy < n)
      {
        slots.slot[v][1] = static_cast<int>(m.edges.size());
        Edge2D e;
        e.v0 = v;
        e.v1 = v + (n + 1);
        e.boundary = (ix == 0 || ix == n);
        m.edges.push_back(e);
      }
      if (ix < n && iy < n)
      {
        slots.slot[v][2] = static_cast<int>(m.edges.size());
        Edge2D e;
        e.v0 = v;
        e.v1 = v + (n + 2);
        e.boundary = false;
        m.edges.push_back(e);
      }
    }

  m.tris.resize(m.n_tris());
  for (int iy = 0; iy < n; iy++)
    for (int ix = 0; ix < n; ix++)
    {
      int bl = m.vertex_id(ix, iy);
      int br = bl + 1;
      int tl = bl + (n + 1);
      int tr = tl + 1;
      int cell = iy * n + ix;

      Tri2D &lo = m.tris[2 * cell];
      lo.v = {bl, br, tr};
      lo.edge = {slots.get(bl, 0), slots.get(br, 1), slots.get(bl, 2)};
      lo.sign = {1, 1, 1};

      Tri2D &up = m.tris[2 * cell + 1];
      up.v = {bl, tr, tl};
      up.edge = {slots.get(bl, 2), slots.get(tl, 0), slots.get(bl, 1)};
      up.sign = {1, -1, 1};
    }

  for (int t = 0; t < m.n_tris(); t++)
    for (int k = 0; k < 3; k++)
    {
      Edge2D &e = m.edges[m.tris[t].edge[k]];
      e.tri[e.tri[0] < 0 ? 0 : 1] = t;
    }

  m.vertex_edges.resize(m.n_vertices());
  for (int e = 0; e < m.n_edges(); e++)
  {
    m.vertex_edges[m.edges[e].v0].push_back({e, 0});
    m.vertex_edges[m.edges[e].v1].push_back({e, 1});
  }
  return m;
}

MeshHierarchy1D build_hierarchy_1d(double a, double b, int n0, int levels)
{
  if (a >= b)
    throw std::invalid_argument("build_hierarchy_1d: requires a < b");
  if (n0 < 1 || levels < 1)
    throw std::invalid_argument("build_hierarchy_1d: n0 and levels must be >= 1");
  MeshHierarchy1D hier;
  for (int l = 0; l < levels; l++)
    hier.meshes.push_back({a, b, n0 << l, l});
  return hier;
}

MeshHierarchy2D build_hierarchy_2d(int n0, int levels, double x0, double y0, double extent)
{
  if (n0 < 1 || levels < 1)
    throw std::invalid_argument("build_hierarchy_2d: n0 and levels must be >= 1");
  MeshHierarchy2D hier;
  for (int l = 0; l < levels; l++)
    hier.meshes.push_back(build_mesh_2d(n0 << l, l, x0, y0, extent));

  for (int l = 0; l + 1 < levels; l++)
  {
    const Mesh2D &c = hier.meshes[l];
    const Mesh2D &f = hier.meshes[l + 1];
    std::vector<std::array<int, 2>> ce(c.n_edges());
    for (int e = 0; e < c.n_edges(); e++)
    {
      // Each coarse edge splits at its midpoint into two fine edges of the
      // same shape class; find them by locating their midpoints' vertices.
      Vec2 pa = c.vertex[c.edges[e].v0];
      Vec2 pm = c.edge_point(e, 0.5);
      auto fine_vertex = [&](const Vec2 &p) {
        int ix = static_cast<int>(std::lround((p.x - f.x0) / f.h()));
        int iy = static_cast<int>(std::lround((p.y - f.y0) / f.h()));
        return f.vertex_id(ix, iy);
      };
      int a = fine_vertex(pa), mid = fine_vertex(pm);
      int found = 0;
      for (auto [fe, end] : f.vertex_edges[mid])
      {
        int other = end == 0 ? f.edges[fe].v1 : f.edges[fe].v0;
        int delta_c = c.edges[e].v1 - c.edges[e].v0;
        int kind_c = delta_c == 1 ? 0 : (delta_c == c.n + 1 ? 1 : 2);
        int delta_f = std::abs(f.edges[fe].v1 - f.edges[fe].v0);
        int kind_f = delta_f == 1 ? 0 : (delta_f == f.n + 1 ? 1 : 2);
        if (kind_f != kind_c)
          continue;
        ce[e][other == a ? 0 : 1] = fe;
        found++;
      }
      if (found != 2)
        throw std::logic_error("build_hierarchy_2d: edge genealogy failed");
    }
    hier.child_edges.push_back(std::move(ce));

    std::vector<std::array<int, 4>> ct(c.n_tris());
    for (int iy = 0; iy < c.n; iy++)
      for (int ix = 0; ix < c.n; ix++)
      {
        int cell = iy * c.n + ix;
        auto fcell = [&](int ax, int ay) { return (2 * iy + ay) * f.n + (2 * ix + ax); };
        ct[2 * cell] = {2 * fcell(0, 0), 2 * fcell(1, 0), 2 * fcell(1, 0) + 1,
                        2 * fcell(1, 1)};
        ct[2 * cell + 1] = {2 * fcell(0, 0) + 1, 2 * fcell(0, 1), 2 * fcell(0, 1) + 1,
                            2 * fcell(1, 1) + 1};
      }
    hier.child_tris.push_back(std::move(ct));
  }
  return hier;
}

EdgeAncestry classify_fine_edge(const MeshHierarchy2D &hier, int l, int fine_edge)
{
  const Mesh2D &c = hier.meshes[l];
  const Mesh2D &f = hier.meshes[l + 1];
  for (int e = 0; e < c.n_edges(); e++)
    for (int k = 0; k < 2; k++)
      if (hier.child_edges[l][e][k] == fine_edge)
        return {true, e};
  Vec2 mid = f.edge_point(fine_edge, 0.5);
  int t;
  double xi, eta;
  c.locate(mid, t, xi, eta);
  return {false, t};
}

int skeleton_dof_count(const Mesh2D &mesh, int p)
{
  if (p < 1)
    throw std::invalid_argument("skeleton_dof_count: p must be >= 1");
  return (p + 1) * mesh.n_edges();
}

int skeleton_dof_count(const Mesh1D &mesh)
{
  return mesh.n_nodes();
}

void export_text(const Mesh2D &mesh, std::ostream &os)
{
  os << "mesh2d n " << mesh.n << " level " << mesh.level << "\n";
  for (int v = 0; v < mesh.n_vertices(); v++)
    os << "vertex " << v << " " << mesh.vertex[v].x << " " << mesh.vertex[v].y << "\n";
  for (int e = 0; e < mesh.n_edges(); e++)
    os << "edge " << e << " " << mesh.edges[e].v0 << " " << mesh.edges[e].v1 << " "
       << (mesh.edges[e].boundary ? "boundary" : "interior") << "\n";
  for (int t = 0; t < mesh.n_tris(); t++)
  {
    const Tri2D &tri = mesh.tris[t];
    os << "tri " << t << " " << tri.v[0] << " " << tri.v[1] << " " << tri.v[2] << " edges "
       << tri.edge[0] << " " << tri.edge[1] << " " << tri.edge[2] << " region " << tri.region
       << "\n";
  }
}

}  // namespace hdgmg
