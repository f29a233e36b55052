// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace hdgmg
{

struct QuadRule1D
{
  std::vector<double> x;  // points on [0,1]
  std::vector<double> w;  // weights summing to 1
};

// Gauss-Legendre rule with n points mapped to [0,1]; exact for degree 2n-1.
QuadRule1D gauss_legendre(int n);

struct QuadRuleTri
{
  std::vector<double> x, y;  // points on the reference triangle (0,0),(1,0),(0,1)
  std::vector<double> w;     // weights summing to 1/2
};

// Collapsed-coordinate (Duffy) product rule with n x n Gauss points; exact for
// total degree 2n-2 polynomials on the triangle.
QuadRuleTri triangle_rule(int n);

}  // namespace hdgmg
