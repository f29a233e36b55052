// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/problems.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hdgmg/bessel.hpp"

namespace hdgmg
{

namespace
{

constexpr cplx iunit(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;

}  // namespace

SecondOrderProblem bessel_example(double kappa)
{
  const cplx C = (std::cos(kappa) + iunit * std::sin(kappa)) /
                 (kappa * (bessel_j0(kappa) + iunit * bessel_j1(kappa)));
  SecondOrderProblem prob;
  prob.kappa = kappa;
  prob.exact = [kappa, C](const Vec2 &x) {
    double r = x.norm();
    return std::cos(kappa * r) / kappa - C * bessel_j0(kappa * r);
  };
  prob.f_ex = [kappa](const Vec2 &x) {
    double r = x.norm();
    if (kappa * r < 1e-8)
      return cplx(kappa, 0.0);
    return cplx(std::sin(kappa * r) / r, 0.0);
  };
  prob.g_ex = [kappa, C](const Vec2 &x, const Vec2 &n) {
    double r = x.norm();
    cplx u = std::cos(kappa * r) / kappa - C * bessel_j0(kappa * r);
    // Radial derivative; du/dn = u'(r) (x.n)/r away from the origin.
    cplx du = -std::sin(kappa * r) + C * kappa * bessel_j1(kappa * r);
    double rn = r < 1e-14 ? 0.0 : x.dot(n) / r;
    return du * rn + iunit * kappa * u;
  };
  return prob;
}

SecondOrderProblem plane_wave_example(double kappa, double dx, double dy)
{
  double len = std::sqrt(dx * dx + dy * dy);
  dx /= len;
  dy /= len;
  SecondOrderProblem prob;
  prob.kappa = kappa;
  prob.exact = [kappa, dx, dy](const Vec2 &x) {
    return std::exp(iunit * kappa * (dx * x.x + dy * x.y));
  };
  prob.f_ex = [](const Vec2 &) { return cplx(0.0, 0.0); };
  prob.g_ex = [kappa, dx, dy](const Vec2 &x, const Vec2 &n) {
    cplx u = std::exp(iunit * kappa * (dx * x.x + dy * x.y));
    cplx du = iunit * kappa * (dx * n.x + dy * n.y) * u;
    return du + iunit * kappa * u;
  };
  return prob;
}

HelmholtzProblem to_mixed_form(const SecondOrderProblem &prob, int p, double x0, double y0,
                               double extent)
{
  const double kappa = prob.kappa;
  HelmholtzProblem out;
  out.kappa_by_region = {kappa};
  out.p = p;
  out.f = [f = prob.f_ex, kappa](const Vec2 &x) { return f(x) / (iunit * kappa); };
  out.g = [g = prob.g_ex, kappa, x0, y0, extent](const Vec2 &x) {
    const double tol = 1e-9 * extent;
    Vec2 n{0.0, 0.0};
    if (std::abs(x.x - x0) < tol)
      n = {-1.0, 0.0};
    else if (std::abs(x.x - (x0 + extent)) < tol)
      n = {1.0, 0.0};
    else if (std::abs(x.y - y0) < tol)
      n = {0.0, -1.0};
    else if (std::abs(x.y - (y0 + extent)) < tol)
      n = {0.0, 1.0};
    else
      throw std::logic_error("to_mixed_form: boundary point not on the domain boundary");
    return g(x, n) / (iunit * kappa);
  };
  return out;
}

std::vector<int> cave_regions(const Mesh2D &mesh, const CaveConfig &cfg)
{
  auto inside = [](const double box[4], double x, double y) {
    return x > box[0] && x < box[2] && y > box[1] && y < box[3];
  };
  std::vector<int> regions(static_cast<size_t>(mesh.n_tris()), 0);
  for (int t = 0; t < mesh.n_tris(); t++)
  {
    Vec2 a = mesh.tri_vertex(t, 0), b = mesh.tri_vertex(t, 1), c = mesh.tri_vertex(t, 2);
    double cx = (a.x + b.x + c.x) / 3.0, cy = (a.y + b.y + c.y) / 3.0;
    if (inside(cfg.inner, cx, cy))
      regions[static_cast<size_t>(t)] = 2;
    else if (inside(cfg.mid, cx, cy))
      regions[static_cast<size_t>(t)] = 1;
  }
  return regions;
}

void validate_cave_alignment(const Mesh2D &coarsest, const CaveConfig &cfg)
{
  auto check = [&](double c, double origin, const char *what) {
    double s = (c - origin) / coarsest.h();
    if (std::abs(s - std::lround(s)) > 1e-9)
      throw std::invalid_argument(std::string("cave region boundary ") + what + " = " +
                                  std::to_string(c) +
                                  " is not aligned to the coarsest mesh lines");
  };
  for (int i = 0; i < 4; i++)
  {
    double origin = (i % 2 == 0) ? coarsest.x0 : coarsest.y0;
    check(cfg.mid[i], origin, i % 2 == 0 ? "mid x" : "mid y");
    check(cfg.inner[i], origin, i % 2 == 0 ? "inner x" : "inner y");
  }
  if (!(cfg.inner[0] > cfg.mid[0] && cfg.inner[1] > cfg.mid[1] &&
        cfg.inner[2] < cfg.mid[2] && cfg.inner[3] < cfg.mid[3]))
    throw std::invalid_argument("cave inner box must lie strictly inside the middle box");
}

HelmholtzProblem cave_problem(const CaveConfig &cfg, int p)
{
  HelmholtzProblem prob;
  prob.kappa_by_region = {cfg.kappa3, cfg.kappa3 / cfg.q2, cfg.kappa3 / cfg.q1};
  prob.p = p;
  const double kappa = cfg.kappa3;
  prob.f = [kappa](const Vec2 &x) {
    double c = 4.0 * kappa / kPi;
    return std::exp(-c * c * (x.x * x.x + x.y * x.y)) / (iunit * kappa);
  };
  prob.g = [](const Vec2 &) { return cplx(0.0, 0.0); };
  return prob;
}

}  // namespace hdgmg
