// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_MESH_HPP
#define HDGMG_MESH_HPP

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hdgmg/types.hpp"

namespace hdgmg
{

// Uniform 1D interval mesh.
struct Mesh1D
{
  double a = 0.0, b = 1.0;
  int n = 1;      // element count
  int level = 0;

  double h() const { return (b - a) / n; }
  int n_nodes() const { return n + 1; }
  double node(int i) const { return a + i * h(); }
};

struct Edge2D
{
  int v0, v1;             // endpoints, v0 < v1 (global orientation)
  int tri[2] = {-1, -1};  // adjacent triangles (tri[1] = -1 on the boundary)
  bool boundary = false;
};

struct Tri2D
{
  std::array<int, 3> v;     // CCW vertex ids
  std::array<int, 3> edge;  // global ids of local edges (v0,v1), (v1,v2), (v0,v2)
  std::array<int, 3> sign;  // +1 if local traversal matches the global v0->v1 direction
  int region = 0;           // material label (piecewise-constant kappa)
};

// Structured triangulation of an axis-aligned square: n x n cells, each split
// by its bottom-left -> top-right diagonal.  Edges are ordered lexicographically
// by (min vertex id, max vertex id).
struct Mesh2D
{
  int n = 1;
  int level = 0;
  double x0 = 0.0, y0 = 0.0;  // lower-left corner
  double extent = 1.0;

  std::vector<Vec2> vertex;
  std::vector<Edge2D> edges;
  std::vector<Tri2D> tris;
  std::vector<std::vector<std::pair<int, int>>> vertex_edges;  // (edge id, endpoint 0|1)

  double h() const { return extent / n; }
  int n_vertices() const { return (n + 1) * (n + 1); }
  int n_edges() const { return 3 * n * n + 2 * n; }
  int n_tris() const { return 2 * n * n; }
  int vertex_id(int ix, int iy) const { return iy * (n + 1) + ix; }

  double edge_length(int e) const;
  // Point at parameter s in [0,1] along the global v0->v1 direction.
  Vec2 edge_point(int e, double s) const;
  Vec2 tri_vertex(int t, int k) const { return vertex[tris[t].v[k]]; }
  // Affine map from the reference triangle (0,0),(1,0),(0,1).
  Vec2 map_to_physical(int t, double xi, double eta) const;
  // Containing triangle of a physical point with deterministic diagonal
  // tie-break (points on the diagonal go to the lower triangle).
  void locate(const Vec2 &p, int &t, double &xi, double &eta) const;

  void set_regions(const std::vector<int> &labels);
};

Mesh2D build_mesh_2d(int n, int level = 0, double x0 = 0.0, double y0 = 0.0, double extent = 1.0);

struct MeshHierarchy1D
{
  std::vector<Mesh1D> meshes;  // coarse -> fine
  int L() const { return static_cast<int>(meshes.size()) - 1; }
};

struct MeshHierarchy2D
{
  std::vector<Mesh2D> meshes;  // coarse -> fine
  // child_edges[l][e] = the two level-(l+1) edges covering level-l edge e,
  // ordered along the coarse v0->v1 direction; l in [0, L).
  std::vector<std::vector<std::array<int, 2>>> child_edges;
  // child_tris[l][t] = the four level-(l+1) triangles covering level-l tri t.
  std::vector<std::vector<std::array<int, 4>>> child_tris;

  int L() const { return static_cast<int>(meshes.size()) - 1; }
};

MeshHierarchy1D build_hierarchy_1d(double a, double b, int n0, int levels);
MeshHierarchy2D build_hierarchy_2d(int n0, int levels, double x0 = 0.0, double y0 = 0.0,
                                   double extent = 1.0);

// Classification of a fine edge relative to the next-coarser mesh.
struct EdgeAncestry
{
  bool on_coarse_edge;  // else strictly inside a coarse triangle
  int coarse_id;        // edge id or triangle id at level l
};

EdgeAncestry classify_fine_edge(const MeshHierarchy2D &hier, int l, int fine_edge);

int skeleton_dof_count(const Mesh2D &mesh, int p);
int skeleton_dof_count(const Mesh1D &mesh);

// Plain-text dump: one entity per line.
void export_text(const Mesh2D &mesh, std::ostream &os);

}  // namespace hdgmg

#endif  // HDGMG_MESH_HPP
