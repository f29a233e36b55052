// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/quadrature.hpp"

#include <cmath>

namespace hdgmg
{

QuadRule1D gauss_legendre(int n)
{
  // Newton iteration on Legendre polynomials, nodes on [-1,1] then mapped.
  QuadRule1D q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < n; i++)
  {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; it++)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; k++)
      {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    q.x[n - 1 - i] = 0.5 * (x + 1.0);
    q.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

QuadRuleTri triangle_rule(int n)
{
  QuadRule1D g = gauss_legendre(n);
  QuadRuleTri q;
  q.x.reserve(n * n);
  q.y.reserve(n * n);
  q.w.reserve(n * n);
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++)
    {
      // Duffy map (s,t) in [0,1]^2 -> (s, t(1-s)), Jacobian (1-s).
      double s = g.x[a], t = g.x[b];
      q.x.push_back(s);
      q.y.push_back(t * (1.0 - s));
      q.w.push_back(g.w[a] * g.w[b] * (1.0 - s));
    }
  return q;
}

}  // namespace hdgmg
