#pragma once

#include <functional>
#include <vector>

#include "shadowkit/discretize.hpp"

namespace shadowkit::solve {

using discretize::Grid;
using discretize::Params;
using discretize::SparseMatrix;
using discretize::State;

struct NewtonOptions {
  double tol = 1e-10;            ///< on the sup-norm of the residual
  int max_iter = 50;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double min_step = 1.0 / 1048576.0;
  double v_floor = -0.5;         ///< iterates need min(v) > v_floor
};

struct NewtonTrace {
  int iterations = 0;
  std::vector<double> residual_norms;  ///< sup-norm, one entry per iterate including the initial one
  std::vector<double> step_lengths;
};

namespace detail {

/// Residual, Jacobian and domain test of a square system F(x) = 0.
struct System {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  std::function<SparseMatrix(const Eigen::VectorXd&)> jacobian;
  std::function<bool(const Eigen::VectorXd&)> in_domain;
};

/// Armijo-damped Newton. Throws SingularJacobian, NoConvergence or LeftDomain.
Eigen::VectorXd damped_newton(const System& sys, Eigen::VectorXd x, const NewtonOptions& opt,
                              NewtonTrace* trace = nullptr);

}  // namespace detail

/// Newton on the augmented system (profile and lambda).
State newton(const State& init, double eps, const Params& P, const NewtonOptions& opt = {},
             NewtonTrace* trace = nullptr);

/// Newton on the profile rows only, lambda frozen.
Eigen::VectorXd solve_fixed_lambda(const Grid& grid, const Eigen::VectorXd& init_v, double lambda,
                                   double eps, const Params& P, const NewtonOptions& opt = {},
                                   NewtonTrace* trace = nullptr);

struct RelaxOptions {
  double tol = 1e-10;      ///< stop once sup|v_t| <= tol
  double cfl = 0.9;        ///< fraction of the explicit stability bound h^2/(2 eps)
};

/// Explicit Euler on v_t = eps D2 v + f(v, lambda) until stationary.
/// Throws Blowup when sup|v| > 10 a2/c2 and NoConvergence when t_end is reached first.
Eigen::VectorXd relax_oracle(const Grid& grid, const Eigen::VectorXd& init_v, double lambda, double eps,
                             const Params& P, double t_end, const RelaxOptions& opt = {});

}  // namespace shadowkit::solve
