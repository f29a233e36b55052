// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_PROBLEMS_HPP
#define HDGMG_PROBLEMS_HPP

#include <functional>
#include <vector>

#include "hdgmg/hdg.hpp"
#include "hdgmg/mesh.hpp"
#include "hdgmg/types.hpp"

namespace hdgmg
{

// Second-order statement -Delta u - kappa^2 u = f with the absorbing
// boundary condition du/dn + i kappa u = g; the boundary callable receives
// the point and the outward unit normal.
struct SecondOrderProblem
{
  double kappa = 1.0;
  std::function<cplx(const Vec2 &)> f_ex;
  std::function<cplx(const Vec2 &, const Vec2 &)> g_ex;
  std::function<cplx(const Vec2 &)> exact;  // null when unknown
};

// Radial exact solution built from Bessel functions on the centered unit
// square: u = cos(kappa r)/kappa - C J0(kappa r) with
// C = (cos kappa + i sin kappa) / (kappa (J0(kappa) + i J1(kappa))),
// source f = sin(kappa r)/r (value kappa at r = 0).
SecondOrderProblem bessel_example(double kappa);

// Plane wave u = exp(i kappa d.x), |d| = 1: zero source, boundary data from
// the exact solution.
SecondOrderProblem plane_wave_example(double kappa, double dx, double dy);

// First-order (mixed) form on an axis-aligned square domain: f and g are
// scaled by 1/(i kappa) so that eliminating the flux recovers the
// second-order problem.  The boundary normal is inferred from the point.
HelmholtzProblem to_mixed_form(const SecondOrderProblem &prob, int p, double x0, double y0,
                               double extent);

// Cave model: nested axis-aligned boxes with piecewise-constant wave number
// kappa3 = q2 kappa2 = q1 kappa1 (outer kappa3, middle kappa2, inner cavity
// kappa1) and a narrow Gaussian source at the origin, g = 0.
struct CaveConfig
{
  double kappa3 = 100.0;
  double q1 = 4.0, q2 = 2.0;
  double mid[4] = {-0.25, -0.25, 0.25, 0.25};        // xmin, ymin, xmax, ymax
  double inner[4] = {-0.125, -0.125, 0.125, 0.125};  // strictly inside mid
};

// Region label (0 outer, 1 middle, 2 inner) per element, by centroid.
std::vector<int> cave_regions(const Mesh2D &mesh, const CaveConfig &cfg);
// Throws std::invalid_argument when a box edge does not lie on a mesh line of
// the given (coarsest) mesh.
void validate_cave_alignment(const Mesh2D &coarsest, const CaveConfig &cfg);
// Mixed-form problem for the cave model (kappa_by_region has three entries).
HelmholtzProblem cave_problem(const CaveConfig &cfg, int p);

}  // namespace hdgmg

#endif  // HDGMG_PROBLEMS_HPP
