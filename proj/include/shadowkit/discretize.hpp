#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "shadowkit/model.hpp"

namespace shadowkit::discretize {

using model::Params;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Vertex-centred uniform grid with nodes x_i = i L / n, i = 0..n.
class Grid {
 public:
  Grid() : Grid(2, 1.0) {}
  Grid(int n, double L);

  int cells() const { return n_; }
  int size() const { return n_ + 1; }
  double length() const { return L_; }
  double spacing() const { return L_ / n_; }
  double node(int i) const;
  Eigen::VectorXd nodes() const;
  /// Trapezoid weights: h/2 at the ends, h inside.
  const Eigen::VectorXd& weights() const { return w_; }

 private:
  int n_;
  double L_;
  Eigen::VectorXd w_;
};

struct State {
  Eigen::VectorXd v;
  double lambda = 0.0;
  Grid grid;
};

/// (v_{i-1} - 2 v_i + v_{i+1}) / h^2 with ghost nodes v_{-1} = v_1, v_{n+1} = v_{n-1}.
Eigen::VectorXd second_difference(const Grid& grid, const Eigen::VectorXd& v);

/// Trapezoid rule on the grid.
double trapezoid(const Grid& grid, const Eigen::VectorXd& values);

/// Rows 0..n: eps D2 v + f(v_i, lambda). Row n+1: trapezoid of g.
Eigen::VectorXd residual(const State& S, double eps, const Params& P);

/// Bordered (n+2) x (n+2) Jacobian of residual().
SparseMatrix jacobian(const State& S, double eps, const Params& P);

/// Derivative of residual() with respect to eps.
Eigen::VectorXd residual_eps(const State& S);

/// Rows 0..n of residual() with lambda frozen, and their Jacobian.
Eigen::VectorXd pde_residual(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                             const Params& P);
SparseMatrix pde_jacobian(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                          const Params& P);

/// (2/L) int (v - v_bar) cos(k pi x / L) dx by trapezoid.
double amplitude(const State& S, int k, const Params& P);

/// Samples of cos(k pi x / L).
Eigen::VectorXd cosine_mode(const Grid& grid, int k);

/// k-th eigenvalue of -D2 under Neumann reflection: (2/h sin(k pi h / (2L)))^2.
double neumann_eigenvalue(const Grid& grid, int k);

/// Bifurcation value of the discrete problem for mode k.
double discrete_bifurcation_eps(const Grid& grid, int k, const Params& P);

}  // namespace shadowkit::discretize
