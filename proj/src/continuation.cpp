#include "shadowkit/continuation.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "shadowkit/error.hpp"
#include "shadowkit/io.hpp"
#include "shadowkit/solve.hpp"
#include "shadowkit/spectrum.hpp"

namespace shadowkit::continuation {

using discretize::SparseMatrix;
using Eigen::VectorXd;

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Fold: return "Fold";
    case EventKind::LeftDomain: return "LeftDomain";
    case EventKind::EpsBelowMin: return "EpsBelowMin";
    case EventKind::PositivityExhausted: return "PositivityExhausted";
    case EventKind::StepTooSmall: return "StepTooSmall";
    case EventKind::SMaxReached: return "SMaxReached";
    case EventKind::MaxPoints: return "MaxPoints";
  }
  return "Unknown";
}

namespace {

// Path follower on y = (v_0..v_n, lambda, eps) with the weighted inner product
// <a, b> = sum_i (w_i / L) a_i b_i + a_lambda b_lambda + a_eps b_eps.
class Tracer {
 public:
  Tracer(const Params& P, const Grid& grid, int k, const ContinuationOptions& opt)
      : P_(P), grid_(grid), k_(k), m_(grid.size()), opt_(opt), W_(grid.size() + 2) {
    W_.head(m_) = grid.weights() / grid.length();
    W_(m_) = 1.0;
    W_(m_ + 1) = 1.0;
  }

  int m() const { return m_; }
  double wnorm(const VectorXd& x) const { return std::sqrt(x.cwiseAbs2().dot(W_)); }
  double wdot(const VectorXd& a, const VectorXd& b) const { return a.cwiseProduct(W_).dot(b); }
  State unpack(const VectorXd& y) const { return State{y.head(m_), y(m_), grid_}; }

  SparseMatrix extended_jacobian(const VectorXd& y, const VectorXd& row) const {
    const State S = unpack(y);
    const SparseMatrix J = discretize::jacobian(S, y(m_ + 1), P_);
    const VectorXd Fe = discretize::residual_eps(S);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(J.nonZeros() + 2 * m_ + 4);
    for (int c = 0; c < J.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(J, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    }
    for (int i = 0; i <= m_; ++i) {
      if (Fe(i) != 0.0) t.emplace_back(i, m_ + 1, Fe(i));
    }
    for (int j = 0; j < m_ + 2; ++j) {
      if (row(j) != 0.0) t.emplace_back(m_ + 1, j, row(j));
    }
    SparseMatrix E(m_ + 2, m_ + 2);
    E.setFromTriplets(t.begin(), t.end());
    E.makeCompressed();
    return E;
  }

  // Unit tangent at y, oriented so that <tangent, ref> > 0.
  VectorXd tangent(const VectorXd& y, const VectorXd& ref) const {
    const SparseMatrix E = extended_jacobian(y, ref.cwiseProduct(W_));
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu(E);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularJacobian, "tangent system is singular");
    VectorXd rhs = VectorXd::Zero(m_ + 2);
    rhs(m_ + 1) = 1.0;
    VectorXd t = lu.solve(rhs);
    if (!t.allFinite()) throw Error(ErrorKind::SingularJacobian, "tangent is not finite");
    t /= wnorm(t);
    if (wdot(t, ref) < 0.0) t = -t;
    return t;
  }

  VectorXd correct(const VectorXd& y_pred, const VectorXd& tau, int* iterations) const {
    const VectorXd row = tau.cwiseProduct(W_);
    solve::detail::System sys;
    sys.residual = [&](const VectorXd& y) {
      VectorXd r(m_ + 2);
      r.head(m_ + 1) = discretize::residual(unpack(y), y(m_ + 1), P_);
      r(m_ + 1) = row.dot(y - y_pred);
      return r;
    };
    sys.jacobian = [&](const VectorXd& y) { return extended_jacobian(y, row); };
    sys.in_domain = [&](const VectorXd& y) {
      return y.allFinite() && y.head(m_).minCoeff() > -0.5 && y(m_ + 1) > 0.0;
    };
    solve::NewtonOptions nopt;
    nopt.tol = opt_.tol;
    nopt.max_iter = opt_.corrector_max_iter;
    solve::NewtonTrace trace;
    VectorXd y = solve::detail::damped_newton(sys, y_pred, nopt, &trace);
    if (iterations) *iterations = trace.iterations;
    return y;
  }

  BranchPoint make_point(const VectorXd& y, int iterations, bool with_stability) const {
    BranchPoint p;
    p.state = unpack(y);
    p.eps = y(m_ + 1);
    p.lambda = y(m_);
    p.s = discretize::amplitude(p.state, k_, P_);
    p.corrector_iterations = iterations;
    p.leading_eig = std::numeric_limits<double>::quiet_NaN();
    if (with_stability) {
      p.leading_eig = spectrum::leading_real_part(p.state, p.eps, P_);
      p.stable = p.leading_eig <= -opt_.stability_margin;
    }
    return p;
  }

  VectorXd pack(const State& S, double eps) const {
    VectorXd y(m_ + 2);
    y << S.v, S.lambda, eps;
    return y;
  }

  // Follows the branch from (y, tau) with arclength step ds until an endpoint event.
  void run(Branch& B, VectorXd y, VectorXd tau, double ds, double ds_cap, bool use_s_max) const {
    const double ds_floor = ds_cap / opt_.max_step_factor * std::ldexp(1.0, -opt_.max_halvings);
    int easy = 0;
    auto stop = [&](EventKind kind, const std::string& detail) {
      B.events.push_back({kind, B.points.empty() ? 0 : B.points.size() - 1,
                          B.points.empty() ? 0.0 : B.points.back().eps, detail});
    };
    while (true) {
      if (static_cast<int>(B.points.size()) >= opt_.max_points) {
        stop(EventKind::MaxPoints, "point budget exhausted");
        break;
      }
      VectorXd y_new;
      int iters = 0;
      ErrorKind last = ErrorKind::NoConvergence;
      bool ok = false;
      while (!ok) {
        try {
          y_new = correct(y + ds * tau, tau, &iters);
          ok = true;
        } catch (const Error& e) {
          last = e.kind();
          ds *= 0.5;
          easy = 0;
          if (ds < ds_floor) break;
        }
      }
      if (!ok) {
        stop(last == ErrorKind::LeftDomain ? EventKind::LeftDomain : EventKind::StepTooSmall,
             std::string("corrector failed: ") + shadowkit::to_string(last));
        break;
      }
      VectorXd tau_new = tangent(y_new, tau);
      const bool fold = tau(m_ + 1) != 0.0 && tau_new(m_ + 1) * tau(m_ + 1) < 0.0;

      const std::size_t idx = B.points.size();
      const bool with_stab = opt_.compute_stability && (opt_.stability_every <= 1 ||
                                                        idx % static_cast<std::size_t>(opt_.stability_every) == 0);
      B.points.push_back(make_point(y_new, iters, with_stab));
      y = y_new;
      tau = tau_new;
      B.end_tangent = tau;
      B.end_step = ds;
      const BranchPoint& p = B.points.back();

      if (fold) {
        stop(EventKind::Fold, "eps-component of the tangent changed sign");
        if (opt_.stop_at_fold) break;
      }
      if (p.state.v.minCoeff() < opt_.positivity_floor) {
        stop(EventKind::PositivityExhausted, "min v below positivity floor");
        break;
      }
      if (opt_.eps_min > 0.0 && p.eps <= opt_.eps_min) {
        stop(EventKind::EpsBelowMin, "eps reached eps_min");
        break;
      }
      if (use_s_max && std::abs(p.s) >= opt_.s_max) {
        stop(EventKind::SMaxReached, "amplitude reached s_max");
        break;
      }
      if (iters <= opt_.easy_iterations) {
        if (++easy >= opt_.easy_steps_to_grow) {
          ds = std::min(ds * opt_.grow, ds_cap);
          easy = 0;
        }
      } else {
        easy = 0;
      }
    }
  }

 private:
  const Params& P_;
  Grid grid_;
  int k_;
  int m_;
  ContinuationOptions opt_;
  VectorXd W_;
};

Branch trace_half(int k, const Params& P, const ContinuationOptions& opt, double sign) {
  const model::ConstantState cs = model::constant_state(P);
  const Grid grid(opt.n, P.L);
  const double eps_h = discretize::discrete_bifurcation_eps(grid, k, P);
  Tracer tr(P, grid, k, opt);
  const int m = tr.m();

  Branch B;
  B.k = k;
  B.params = P;
  B.origin_eps = eps_h;
  B.origin_lambda = cs.lambda_bar;
  B.origin_v_bar = cs.v_bar;

  VectorXd y0(m + 2);
  y0.head(m).setConstant(cs.v_bar);
  y0(m) = cs.lambda_bar;
  y0(m + 1) = eps_h;
  VectorXd tau0 = VectorXd::Zero(m + 2);
  tau0.head(m) = sign * discretize::cosine_mode(grid, k);
  const double cnorm = tr.wnorm(tau0);
  tau0 /= cnorm;

  BranchPoint origin = tr.make_point(y0, 0, opt.compute_stability);
  origin.s = 0.0;
  B.points.push_back(origin);

  // Seed: amplitude +-step along the mode, hyperplane normal to the mode.
  double ds = opt.step * cnorm;
  const double ds_cap = opt.max_step_factor * ds;
  VectorXd y1;
  int iters = 0;
  bool ok = false;
  std::string why;
  for (int h = 0; h <= opt.max_halvings && !ok; ++h) {
    try {
      y1 = tr.correct(y0 + ds * tau0, tau0, &iters);
      ok = true;
    } catch (const Error& e) {
      why = e.what();
      ds *= 0.5;
    }
  }
  if (!ok) throw Error(ErrorKind::SeedFailure, "first corrector step failed: " + why);

  VectorXd tau1 = tr.tangent(y1, tau0);
  B.points.push_back(tr.make_point(y1, iters, opt.compute_stability));
  B.end_tangent = tau1;
  B.end_step = ds;
  if (std::abs(B.points.back().s) >= opt.s_max) {
    B.events.push_back({EventKind::SMaxReached, 1, B.points.back().eps, "amplitude reached s_max"});
    return B;
  }
  tr.run(B, y1, tau1, ds, ds_cap, true);
  return B;
}

}  // namespace

std::pair<Branch, Branch> branch_from_bifurcation(int k, const Params& P, const ContinuationOptions& opt) {
  if (!(opt.step > 0.0) || !(opt.s_max > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "continuation step and s_max must be positive");
  }
  return {trace_half(k, P, opt, 1.0), trace_half(k, P, opt, -1.0)};
}

Branch extend_to_small_eps(const Branch& B, double eps_min, const ContinuationOptions& opt) {
  if (B.points.empty() || B.end_tangent.size() == 0) {
    throw Error(ErrorKind::InsufficientData, "branch has no end point to continue from");
  }
  ContinuationOptions o = opt;
  o.eps_min = eps_min;
  const BranchPoint& last = B.points.back();
  const Grid grid = last.state.grid;
  o.n = grid.cells();
  Tracer tr(B.params, grid, B.k, o);
  Branch out = B;
  out.events.erase(std::remove_if(out.events.begin(), out.events.end(),
                                  [](const BranchEvent& e) { return e.kind == EventKind::SMaxReached; }),
                   out.events.end());
  VectorXd cos_mode = VectorXd::Zero(tr.m() + 2);
  cos_mode.head(tr.m()) = discretize::cosine_mode(grid, B.k);
  const double ds_cap = o.max_step_factor * o.step * tr.wnorm(cos_mode);
  const double ds = std::min(B.end_step > 0.0 ? B.end_step : o.step, ds_cap);
  tr.run(out, tr.pack(last.state, last.eps), B.end_tangent, ds, ds_cap, false);
  return out;
}

Branch merge(const Branch& plus, const Branch& minus) {
  Branch out = plus;
  out.points.clear();
  out.events.clear();
  for (auto it = minus.points.rbegin(); it != minus.points.rend(); ++it) out.points.push_back(*it);
  const std::size_t offset = out.points.size();
  std::size_t start = 0;
  if (!plus.points.empty() && !out.points.empty() && plus.points.front().s == 0.0 &&
      out.points.back().s == 0.0) {
    start = 1;
  }
  for (std::size_t i = start; i < plus.points.size(); ++i) out.points.push_back(plus.points[i]);
  for (const BranchEvent& e : minus.events) {
    BranchEvent r = e;
    r.index = offset - 1 - std::min(e.index, offset - 1);
    out.events.push_back(r);
  }
  for (const BranchEvent& e : plus.events) {
    BranchEvent r = e;
    r.index = e.index + offset - start;
    out.events.push_back(r);
  }
  return out;
}

PitchforkFit fit_pitchfork(const Branch& B, double s_window) {
  std::vector<const BranchPoint*> use;
  for (const BranchPoint& p : B.points) {
    if (p.s != 0.0 && std::abs(p.s) <= s_window) use.push_back(&p);
  }
  if (use.size() < 8) {
    std::ostringstream os;
    os << "need at least 8 points with 0 < |s| <= " << s_window << ", have " << use.size();
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  const Eigen::Index N = static_cast<Eigen::Index>(use.size());
  Eigen::MatrixXd X(N, 2);
  VectorXd ye(N), yl(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double s = use[i]->s;
    X(i, 0) = s;
    X(i, 1) = s * s;
    ye(i) = use[i]->eps - B.origin_eps;
    yl(i) = use[i]->lambda - B.origin_lambda;
  }
  const auto qr = X.colPivHouseholderQr();
  const VectorXd ce = qr.solve(ye);
  const VectorXd cl = qr.solve(yl);
  PitchforkFit fit;
  fit.K1_fit = ce(0);
  fit.K2_fit = ce(1);
  fit.lambda1_fit = cl(0);
  fit.lambda2_fit = cl(1);
  fit.points_used = use.size();
  return fit;
}

std::vector<Detection> detect_bifurcations(const Params& P, double lo, double hi, int k_max,
                                           const DetectOptions& opt) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::InvalidParams, "detection range needs 0 < lo < hi");
  const model::ConstantState cs = model::constant_state(P);
  const Grid grid(opt.n, P.L);
  const int m = grid.size();
  const State S{VectorXd::Constant(m, cs.v_bar), cs.lambda_bar, grid};

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  auto factor = [&](double eps) {
    SparseMatrix J = discretize::jacobian(S, eps, P);
    J.makeCompressed();
    lu.compute(J);
    return lu.info() == Eigen::Success;
  };
  auto det_sign = [&](double eps) -> int {
    if (!factor(eps)) return 0;
    const double sgn = lu.signDeterminant();
    return sgn > 0 ? 1 : (sgn < 0 ? -1 : 0);
  };

  const double ratio = 1.0 + 1.0 / (4.0 * std::max(1, k_max));
  const int pts = std::max(opt.min_sweep_points, static_cast<int>(std::ceil(std::log(hi / lo) / std::log(ratio))) + 1);

  std::vector<Detection> out;
  double e_prev = lo;
  int s_prev = det_sign(lo);
  for (int j = 1; j < pts; ++j) {
    const double e = lo * std::pow(hi / lo, static_cast<double>(j) / (pts - 1));
    const int s = det_sign(e);
    if (s == 0 || s_prev == 0 || s == s_prev) {
      if (s != 0) s_prev = s;
      e_prev = e;
      continue;
    }
    double a = e_prev, b = e;
    const int sa = s_prev;
    while (b - a > opt.rel_tol * b) {
      const double mid = 0.5 * (a + b);
      const int sm = det_sign(mid);
      if (sm == 0) {
        a = b = mid;
        break;
      }
      (sm == sa ? a : b) = mid;
    }
    const double eps_star = 0.5 * (a + b);

    // Kernel by inverse iteration at the crossing.
    Detection d;
    d.eps = eps_star;
    if (factor(eps_star)) {
      VectorXd x = VectorXd::Ones(m + 1);
      for (int i = 0; i < m; ++i) x(i) += 0.37 * grid.node(i) / grid.length();
      for (int it = 0; it < 3; ++it) {
        x = lu.solve(x);
        x /= x.norm();
      }
      const VectorXd phi = x.head(m);
      const double phi_max = phi.cwiseAbs().maxCoeff();
      d.kernel_mean = discretize::trapezoid(grid, phi) / (grid.length() * phi_max);
      const double phi_norm = std::sqrt(discretize::trapezoid(grid, phi.cwiseAbs2()));
      const int j_max = std::min(grid.cells() / 2, 4 * k_max + 8);
      for (int jj = 1; jj <= j_max; ++jj) {
        const VectorXd c = discretize::cosine_mode(grid, jj);
        const double proj = std::abs(discretize::trapezoid(grid, phi.cwiseProduct(c))) /
                            (phi_norm * std::sqrt(discretize::trapezoid(grid, c.cwiseAbs2())));
        if (proj > d.projection) {
          d.projection = proj;
          d.k = jj;
        }
      }
    }
    if (d.k >= 1 && d.k <= k_max) out.push_back(d);
    s_prev = s;
    e_prev = e;
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.k < b.k; });
  return out;
}

bool strictly_monotone(const Eigen::VectorXd& v) {
  if (v.size() < 2) return false;
  const VectorXd d = v.tail(v.size() - 1) - v.head(v.size() - 1);
  return d.minCoeff() > 0.0 || d.maxCoeff() < 0.0;
}

double monotone_fraction(const Branch& B) {
  std::size_t total = 0, mono = 0;
  for (const BranchPoint& p : B.points) {
    if (p.s == 0.0) continue;
    ++total;
    if (strictly_monotone(p.state.v)) ++mono;
  }
  return total == 0 ? 0.0 : static_cast<double>(mono) / static_cast<double>(total);
}

void write_branch_csv(std::ostream& os, const Branch& B, const std::string& header) {
  io::write_comment_block(os, header);
  os << "s,eps,lambda,v_min,v_max,v0,vL,leading_eig,stable\n";
  for (const BranchPoint& p : B.points) {
    const VectorXd& v = p.state.v;
    os << io::fmt(p.s) << ',' << io::fmt(p.eps) << ',' << io::fmt(p.lambda) << ',' << io::fmt(v.minCoeff())
       << ',' << io::fmt(v.maxCoeff()) << ',' << io::fmt(v(0)) << ',' << io::fmt(v(v.size() - 1)) << ','
       << io::fmt(p.leading_eig) << ',' << (p.stable ? 1 : 0) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const BranchPoint& p, const std::string& header) {
  io::write_comment_block(os, header);
  os << "x,v\n";
  for (int i = 0; i < p.state.grid.size(); ++i) {
    os << io::fmt(p.state.grid.node(i)) << ',' << io::fmt(p.state.v(i)) << '\n';
  }
}

}  // namespace shadowkit::continuation
