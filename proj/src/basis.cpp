// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgmg
{

TriBasis::TriBasis(int p) : p_(p), np_((p + 1) * (p + 2) / 2)
{
  if (p < 1 || p > 3)
    throw std::invalid_argument("TriBasis: degree must be in [1,3]");
  for (int j = 0; j <= p; j++)
    for (int i = 0; i <= p - j; i++)
    {
      nx_.push_back(static_cast<double>(i) / p);
      ny_.push_back(static_cast<double>(j) / p);
    }
  Eigen::MatrixXd V(np_, np_);
  for (int k = 0; k < np_; k++)
    V.row(k) = monomials(nx_[k], ny_[k]);
  vinv_ = V.inverse();
}

Eigen::RowVectorXd TriBasis::monomials(double x, double y) const
{
  Eigen::RowVectorXd m(np_);
  int k = 0;
  for (int d = 0; d <= p_; d++)
    for (int a = 0; a <= d; a++)
      m[k++] = std::pow(x, d - a) * std::pow(y, a);
  return m;
}

Eigen::RowVectorXd TriBasis::eval(double x, double y) const
{
  return monomials(x, y) * vinv_;
}

void TriBasis::grad(double x, double y, Eigen::RowVectorXd &gx, Eigen::RowVectorXd &gy) const
{
  Eigen::RowVectorXd mx(np_), my(np_);
  int k = 0;
  for (int d = 0; d <= p_; d++)
    for (int a = 0; a <= d; a++)
    {
      int ex = d - a, ey = a;
      mx[k] = ex > 0 ? ex * std::pow(x, ex - 1) * std::pow(y, ey) : 0.0;
      my[k] = ey > 0 ? ey * std::pow(x, ex) * std::pow(y, ey - 1) : 0.0;
      k++;
    }
  gx = mx * vinv_;
  gy = my * vinv_;
}

int TriBasis::node_location(int node) const
{
  double x = nx_[node], y = ny_[node];
  const double eps = 1e-12;
  bool on_y0 = y < eps;                 // local edge 0: (v0,v1)
  bool on_diag = x + y > 1.0 - eps;     // local edge 1: (v1,v2)
  bool on_x0 = x < eps;                 // local edge 2: (v0,v2)
  if (on_y0 && on_x0)
    return 0;
  if (on_y0 && on_diag)
    return 1;
  if (on_x0 && on_diag)
    return 2;
  if (on_y0)
    return 3;
  if (on_diag)
    return 4;
  if (on_x0)
    return 5;
  return 6;
}

double TriBasis::node_edge_param(int node) const
{
  double x = nx_[node], y = ny_[node];
  switch (node_location(node))
  {
    case 3:
      return x;        // along (0,0)->(1,0)
    case 4:
      return y;        // along (1,0)->(0,1)
    case 5:
      return y;        // along (0,0)->(0,1)
    default:
      throw std::logic_error("node_edge_param: not an edge-interior node");
  }
}

std::vector<double> gauss_lobatto(int p)
{
  switch (p)
  {
    case 1:
      return {0.0, 1.0};
    case 2:
      return {0.0, 0.5, 1.0};
    case 3:
    {
      double c = 1.0 / std::sqrt(5.0);
      return {0.0, 0.5 * (1.0 - c), 0.5 * (1.0 + c), 1.0};
    }
    default:
      throw std::invalid_argument("gauss_lobatto: degree must be in [1,3]");
  }
}

SegBasis::SegBasis(int p) : p_(p), nodes_(gauss_lobatto(p))
{
  Eigen::MatrixXd V(p + 1, p + 1);
  for (int k = 0; k <= p; k++)
    for (int j = 0; j <= p; j++)
      V(k, j) = std::pow(nodes_[k], j);
  vinv_ = V.inverse();
}

Eigen::RowVectorXd SegBasis::eval(double s) const
{
  Eigen::RowVectorXd m(p_ + 1);
  for (int j = 0; j <= p_; j++)
    m[j] = std::pow(s, j);
  return m * vinv_;
}

}  // namespace hdgmg
