#include "shadowkit/solve.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "shadowkit/error.hpp"

namespace shadowkit::solve {

namespace detail {

Eigen::VectorXd damped_newton(const System& sys, Eigen::VectorXd x, const NewtonOptions& opt,
                              NewtonTrace* trace) {
  Eigen::VectorXd r = sys.residual(x);
  double norm = r.lpNorm<Eigen::Infinity>();
  if (trace) {
    trace->iterations = 0;
    trace->residual_norms = {norm};
    trace->step_lengths.clear();
  }
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (norm <= opt.tol) return x;
    SparseMatrix J = sys.jacobian(x);
    J.makeCompressed();
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularJacobian, "LU factorization failed: " + lu.lastErrorMessage());
    }
    const Eigen::VectorXd dx = -lu.solve(r);
    if (!dx.allFinite()) throw Error(ErrorKind::SingularJacobian, "Newton direction is not finite");

    const double phi = r.squaredNorm();
    double t = 1.0;
    bool domain_only = true;
    for (;;) {
      const Eigen::VectorXd xt = x + t * dx;
      if (sys.in_domain(xt)) {
        const Eigen::VectorXd rt = sys.residual(xt);
        if (rt.allFinite() && rt.squaredNorm() <= (1.0 - 2.0 * opt.armijo * t) * phi) {
          x = xt;
          r = rt;
          break;
        }
        domain_only = false;
      }
      t *= opt.backtrack;
      if (t < opt.min_step) {
        std::ostringstream os;
        os << "line search stalled at iteration " << it << " with residual " << norm;
        throw Error(domain_only ? ErrorKind::LeftDomain : ErrorKind::NoConvergence, os.str());
      }
    }
    norm = r.lpNorm<Eigen::Infinity>();
    if (trace) {
      trace->iterations = it + 1;
      trace->residual_norms.push_back(norm);
      trace->step_lengths.push_back(t);
    }
  }
  if (norm <= opt.tol) return x;
  std::ostringstream os;
  os << "no convergence after " << opt.max_iter << " iterations (residual " << norm << ")";
  throw Error(ErrorKind::NoConvergence, os.str());
}

}  // namespace detail

namespace {

bool profile_in_domain(const Eigen::VectorXd& x, int m, double floor) {
  return x.head(m).minCoeff() > floor && x.allFinite();
}

}  // namespace

State newton(const State& init, double eps, const Params& P, const NewtonOptions& opt,
             NewtonTrace* trace) {
  const Grid& grid = init.grid;
  const int m = grid.size();
  if (init.v.size() != m) throw Error(ErrorKind::DimensionMismatch, "initial profile does not match grid");
  auto unpack = [&](const Eigen::VectorXd& x) { return State{x.head(m), x(m), grid}; };
  detail::System sys;
  sys.residual = [&](const Eigen::VectorXd& x) { return discretize::residual(unpack(x), eps, P); };
  sys.jacobian = [&](const Eigen::VectorXd& x) { return discretize::jacobian(unpack(x), eps, P); };
  sys.in_domain = [&](const Eigen::VectorXd& x) { return profile_in_domain(x, m, opt.v_floor); };
  Eigen::VectorXd x0(m + 1);
  x0 << init.v, init.lambda;
  return unpack(detail::damped_newton(sys, x0, opt, trace));
}

Eigen::VectorXd solve_fixed_lambda(const Grid& grid, const Eigen::VectorXd& init_v, double lambda,
                                   double eps, const Params& P, const NewtonOptions& opt,
                                   NewtonTrace* trace) {
  const int m = grid.size();
  if (init_v.size() != m) throw Error(ErrorKind::DimensionMismatch, "initial profile does not match grid");
  detail::System sys;
  sys.residual = [&](const Eigen::VectorXd& v) { return discretize::pde_residual(grid, v, lambda, eps, P); };
  sys.jacobian = [&](const Eigen::VectorXd& v) { return discretize::pde_jacobian(grid, v, lambda, eps, P); };
  sys.in_domain = [&](const Eigen::VectorXd& v) { return profile_in_domain(v, m, opt.v_floor); };
  return detail::damped_newton(sys, init_v, opt, trace);
}

Eigen::VectorXd relax_oracle(const Grid& grid, const Eigen::VectorXd& init_v, double lambda, double eps,
                             const Params& P, double t_end, const RelaxOptions& opt) {
  if (init_v.size() != grid.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial profile does not match grid");
  }
  const double h = grid.spacing();
  const double bound = 10.0 * P.a2 / P.c2;
  Eigen::VectorXd v = init_v;
  double t = 0.0;
  while (t < t_end) {
    double fv_max = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      fv_max = std::max(fv_max, std::abs(model::deriv_bundle(v(i), lambda, P).f_v));
    }
    double dt = opt.cfl * h * h / (2.0 * eps);
    if (fv_max > 0.0) dt = std::min(dt, opt.cfl / fv_max);
    dt = std::min(dt, t_end - t);
    const Eigen::VectorXd vt = discretize::pde_residual(grid, v, lambda, eps, P);
    if (vt.lpNorm<Eigen::Infinity>() <= opt.tol) return v;
    v += dt * vt;
    t += dt;
    if (!v.allFinite() || v.lpNorm<Eigen::Infinity>() > bound || v.minCoeff() <= -1.0) {
      std::ostringstream os;
      os << "profile left the bounded region at t = " << t;
      throw Error(ErrorKind::Blowup, os.str());
    }
  }
  const Eigen::VectorXd vt = discretize::pde_residual(grid, v, lambda, eps, P);
  if (vt.lpNorm<Eigen::Infinity>() <= opt.tol) return v;
  std::ostringstream os;
  os << "not stationary by t = " << t_end << " (sup|v_t| = " << vt.lpNorm<Eigen::Infinity>() << ")";
  throw Error(ErrorKind::NoConvergence, os.str());
}

}  // namespace shadowkit::solve
