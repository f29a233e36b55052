// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "hdgmg/mesh.hpp"

using namespace hdgmg;

TEST_CASE("entity counts follow the closed forms")
{
  for (int n : {1, 2, 3, 8})
  {
    Mesh2D mesh = build_mesh_2d(n);
    CHECK(static_cast<int>(mesh.vertex.size()) == (n + 1) * (n + 1));
    CHECK(static_cast<int>(mesh.edges.size()) == 3 * n * n + 2 * n);
    CHECK(static_cast<int>(mesh.tris.size()) == 2 * n * n);
    CHECK(mesh.n_edges() == 3 * n * n + 2 * n);
    CHECK(mesh.n_tris() == 2 * n * n);

    int boundary = 0;
    for (const Edge2D &e : mesh.edges)
      boundary += e.boundary ? 1 : 0;
    CHECK(boundary == 4 * n);
  }
}

TEST_CASE("edges are lexicographic by (v0, v1) with v0 < v1")
{
  Mesh2D mesh = build_mesh_2d(4);
  for (std::size_t i = 0; i < mesh.edges.size(); i++)
  {
    CHECK(mesh.edges[i].v0 < mesh.edges[i].v1);
    if (i > 0)
    {
      const Edge2D &a = mesh.edges[i - 1], &b = mesh.edges[i];
      CHECK((a.v0 < b.v0 || (a.v0 == b.v0 && a.v1 < b.v1)));
    }
  }
}

TEST_CASE("triangles are CCW and reference their edges consistently")
{
  Mesh2D mesh = build_mesh_2d(3);
  for (int t = 0; t < mesh.n_tris(); t++)
  {
    const Tri2D &tri = mesh.tris[t];
    const Vec2 a = mesh.tri_vertex(t, 0), b = mesh.tri_vertex(t, 1), c = mesh.tri_vertex(t, 2);
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    CHECK(cross > 0.0);

    const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    for (int k = 0; k < 3; k++)
    {
      const Edge2D &e = mesh.edges[tri.edge[k]];
      const int va = tri.v[pairs[k][0]], vb = tri.v[pairs[k][1]];
      if (tri.sign[k] == 1)
      {
        CHECK(e.v0 == va);
        CHECK(e.v1 == vb);
      }
      else
      {
        CHECK(e.v0 == vb);
        CHECK(e.v1 == va);
      }
      // The edge must list this triangle as a neighbor.
      CHECK((e.tri[0] == t || e.tri[1] == t));
    }
  }

  for (const Edge2D &e : mesh.edges)
  {
    if (e.boundary)
      CHECK(e.tri[1] == -1);
    else
      CHECK(e.tri[1] >= 0);
  }
}

TEST_CASE("edge geometry: lengths and parametrization")
{
  Mesh2D mesh = build_mesh_2d(4, 0, -0.5, -0.5, 1.0);
  const double h = mesh.h();
  CHECK(h == doctest::Approx(0.25));
  for (int e = 0; e < mesh.n_edges(); e++)
  {
    const double len = mesh.edge_length(e);
    const bool axis = std::abs(len - h) < 1e-14;
    const bool diag = std::abs(len - std::sqrt(2.0) * h) < 1e-14;
    CHECK((axis || diag));
    const Vec2 p0 = mesh.edge_point(e, 0.0), p1 = mesh.edge_point(e, 1.0);
    CHECK((p1 - p0).norm() == doctest::Approx(len).epsilon(1e-13));
    const Vec2 mid = mesh.edge_point(e, 0.5);
    CHECK((mid - (p0 + p1) * 0.5).norm() < 1e-14);
  }
}

TEST_CASE("locate round-trips interior points and breaks diagonal ties deterministically")
{
  Mesh2D mesh = build_mesh_2d(3);
  for (int t = 0; t < mesh.n_tris(); t++)
  {
    const Vec2 p = mesh.map_to_physical(t, 0.25, 0.25);
    int tt;
    double xi, eta;
    mesh.locate(p, tt, xi, eta);
    CHECK(tt == t);
    const Vec2 q = mesh.map_to_physical(tt, xi, eta);
    CHECK((q - p).norm() < 1e-13);
  }

  // A point on a cell diagonal goes to the triangle below the diagonal:
  // nudging the query below the diagonal must not change the answer.
  const double h = mesh.h();
  const Vec2 on_diag{0.5 * h, 0.5 * h};
  const Vec2 below{0.5 * h + 1e-9, 0.5 * h - 1e-9};
  int t_on, t_below;
  double xi, eta;
  mesh.locate(on_diag, t_on, xi, eta);
  mesh.locate(below, t_below, xi, eta);
  CHECK(t_on == t_below);
  int t_again;
  mesh.locate(on_diag, t_again, xi, eta);
  CHECK(t_again == t_on);
}

TEST_CASE("hierarchy: nested meshes with consistent genealogy")
{
  MeshHierarchy2D hier = build_hierarchy_2d(2, 3);
  REQUIRE(hier.L() == 2);
  CHECK(hier.meshes[0].n == 2);
  CHECK(hier.meshes[1].n == 4);
  CHECK(hier.meshes[2].n == 8);

  for (int l = 0; l < hier.L(); l++)
  {
    const Mesh2D &coarse = hier.meshes[l];
    const Mesh2D &fine = hier.meshes[l + 1];

    REQUIRE(static_cast<int>(hier.child_edges[l].size()) == coarse.n_edges());
    for (int e = 0; e < coarse.n_edges(); e++)
    {
      const auto &kids = hier.child_edges[l][e];
      // The two children split the coarse edge at its midpoint, ordered along
      // the coarse v0 -> v1 direction.
      const Vec2 p0 = coarse.edge_point(e, 0.0);
      const Vec2 mid = coarse.edge_point(e, 0.5);
      const Vec2 p1 = coarse.edge_point(e, 1.0);
      const Edge2D &k0 = fine.edges[kids[0]], &k1 = fine.edges[kids[1]];
      auto near = [&](const Vec2 &a, const Vec2 &b) { return (a - b).norm() < 1e-13; };
      const Vec2 a0 = fine.vertex[k0.v0], a1 = fine.vertex[k0.v1];
      const Vec2 b0 = fine.vertex[k1.v0], b1 = fine.vertex[k1.v1];
      CHECK(((near(a0, p0) && near(a1, mid)) || (near(a0, mid) && near(a1, p0))));
      CHECK(((near(b0, mid) && near(b1, p1)) || (near(b0, p1) && near(b1, mid))));
    }

    REQUIRE(static_cast<int>(hier.child_tris[l].size()) == coarse.n_tris());
    std::set<int> seen;
    for (int t = 0; t < coarse.n_tris(); t++)
    {
      for (int k = 0; k < 4; k++)
      {
        const int ft = hier.child_tris[l][t][k];
        CHECK(seen.insert(ft).second);  // children partition the fine mesh
        // Child centroid must locate inside the coarse parent.
        const Vec2 g = (fine.tri_vertex(ft, 0) + fine.tri_vertex(ft, 1) +
                        fine.tri_vertex(ft, 2)) *
                       (1.0 / 3.0);
        int tc;
        double xi, eta;
        coarse.locate(g, tc, xi, eta);
        CHECK(tc == t);
      }
    }
    CHECK(static_cast<int>(seen.size()) == fine.n_tris());
  }
}

TEST_CASE("fine-edge classification against the coarser level")
{
  MeshHierarchy2D hier = build_hierarchy_2d(2, 2);
  const Mesh2D &coarse = hier.meshes[0];
  const Mesh2D &fine = hier.meshes[1];

  int on_coarse = 0;
  for (int e = 0; e < fine.n_edges(); e++)
  {
    EdgeAncestry anc = classify_fine_edge(hier, 0, e);
    if (anc.on_coarse_edge)
    {
      on_coarse++;
      const auto &kids = hier.child_edges[0][anc.coarse_id];
      CHECK((kids[0] == e || kids[1] == e));
    }
    else
    {
      CHECK(anc.coarse_id >= 0);
      CHECK(anc.coarse_id < coarse.n_tris());
      // Midpoint of an interior fine edge locates inside the named triangle.
      const Vec2 mid = fine.edge_point(e, 0.5);
      int tc;
      double xi, eta;
      coarse.locate(mid, tc, xi, eta);
      CHECK(tc == anc.coarse_id);
    }
  }
  CHECK(on_coarse == 2 * coarse.n_edges());
}

TEST_CASE("skeleton dof counts")
{
  Mesh2D mesh = build_mesh_2d(4);
  for (int p = 1; p <= 3; p++)
    CHECK(skeleton_dof_count(mesh, p) == mesh.n_edges() * (p + 1));

  Mesh1D m1;
  m1.n = 8;
  CHECK(skeleton_dof_count(m1) == 9);
}

TEST_CASE("1D hierarchy doubles the element count per level")
{
  MeshHierarchy1D hier = build_hierarchy_1d(0.0, 1.0, 4, 3);
  REQUIRE(hier.L() == 2);
  CHECK(hier.meshes[0].n == 4);
  CHECK(hier.meshes[1].n == 8);
  CHECK(hier.meshes[2].n == 16);
  CHECK(hier.meshes[2].h() == doctest::Approx(1.0 / 16.0));
  CHECK(hier.meshes[1].node(8) == doctest::Approx(1.0));
}

TEST_CASE("text export lists every entity")
{
  Mesh2D mesh = build_mesh_2d(2);
  std::ostringstream os;
  export_text(mesh, os);
  const std::string text = os.str();
  CHECK(!text.empty());
  int lines = 0;
  for (char c : text)
    lines += c == '\n' ? 1 : 0;
  CHECK(lines >= mesh.n_vertices() + mesh.n_edges() + mesh.n_tris());
}
