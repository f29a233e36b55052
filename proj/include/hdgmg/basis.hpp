// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hdgmg
{

// Nodal Lagrange basis of degree p on the reference triangle (0,0),(1,0),(0,1)
// with nodes on the principal lattice (i/p, j/p), i+j <= p, enumerated j-major
// (row j = 0 first, each row by increasing i).
class TriBasis
{
public:
  explicit TriBasis(int p);

  int degree() const { return p_; }
  int size() const { return np_; }
  const std::vector<double> &node_x() const { return nx_; }
  const std::vector<double> &node_y() const { return ny_; }

  // Values of all basis functions at (x, y): vector of length size().
  Eigen::RowVectorXd eval(double x, double y) const;
  // Reference gradients d/dx, d/dy.
  void grad(double x, double y, Eigen::RowVectorXd &gx, Eigen::RowVectorXd &gy) const;

  // Lattice node classification against the reference triangle boundary:
  // 0,1,2 -> vertex id; 3+le -> interior of local edge le in the order
  // (v0,v1), (v1,v2), (v0,v2); 6 -> triangle interior.
  int node_location(int node) const;
  // Arclength parameter of a boundary lattice node along its local edge
  // (orientation v_first -> v_second of the pairs above).
  double node_edge_param(int node) const;

private:
  Eigen::RowVectorXd monomials(double x, double y) const;
  int p_, np_;
  std::vector<double> nx_, ny_;
  Eigen::MatrixXd vinv_;
};

// Nodal Lagrange basis of degree p on [0,1] with Gauss-Lobatto nodes
// (endpoints always included).
class SegBasis
{
public:
  explicit SegBasis(int p);

  int degree() const { return p_; }
  int size() const { return p_ + 1; }
  const std::vector<double> &nodes() const { return nodes_; }

  Eigen::RowVectorXd eval(double s) const;

private:
  int p_;
  std::vector<double> nodes_;
  Eigen::MatrixXd vinv_;
};

// Gauss-Lobatto points on [0,1] for degree p (p+1 points), p <= 3.
std::vector<double> gauss_lobatto(int p);

}  // namespace hdgmg
