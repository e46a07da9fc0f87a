#include "shadowkit/layer.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "shadowkit/error.hpp"
#include "shadowkit/solve.hpp"

namespace shadowkit::layer {

using Eigen::VectorXd;

namespace {

// Energies near the two saddles, written so that no cancellation occurs as V -> 0 or V -> v2.
struct Energy {
  const Params& P;
  double lambda, v1, v2;

  // f(u) / u
  double h(double u) const { return -P.c2 * (u - v1) * (u - v2) / (1.0 + u); }
  // f(v2 - s) / s
  double k(double s) const { return P.c2 * (v2 - s) * (v2 - s - v1) / (1.0 + v2 - s); }

  // Phi(V) / V^2 with Phi(V) = int_0^V f
  double phi_sq(double V) const {
    return boost::math::quadrature::gauss<double, 10>::integrate([&](double t) { return t * h(V * t); }, 0.0,
                                                                 1.0);
  }
  // (Phi(v2) - Phi(v2 - w)) / w^2
  double e_sq(double w) const {
    return boost::math::quadrature::gauss<double, 10>::integrate([&](double t) { return t * k(w * t); }, 0.0,
                                                                 1.0);
  }
  // d(ln V)/dz on the level of the saddle at 0
  double left_rate(double V) const {
    const double q = -2.0 * phi_sq(V);
    if (!(q > 0.0)) throw Error(ErrorKind::NegativeEnergy, "energy radicand non-positive on the left branch");
    return std::sqrt(q);
  }
  // -d(ln w)/dz on the level of the saddle at v2
  double right_rate(double w) const {
    const double q = 2.0 * e_sq(w);
    if (!(q > 0.0)) throw Error(ErrorKind::NegativeEnergy, "energy radicand non-positive on the right branch");
    return std::sqrt(q);
  }
};

template <class Rate>
double rk4_log(double u, double dz, int nsub, Rate rate) {
  const double hs = dz / nsub;
  for (int s = 0; s < nsub; ++s) {
    const double k1 = rate(std::exp(u));
    const double k2 = rate(std::exp(u + 0.5 * hs * k1));
    const double k3 = rate(std::exp(u + 0.5 * hs * k2));
    const double k4 = rate(std::exp(u + hs * k3));
    u += hs * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
  return u;
}

// Weights of the first derivative at x0 from nodes x (Fornberg's recursion).
std::vector<double> fd_weights(double x0, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace

double Heteroclinic::value(double zq) const {
  const Eigen::Index N = z.size();
  const Eigen::Index c = (N - 1) / 2;
  if (zq <= z(0)) return deviation(0) * std::exp(kappa_minus * (zq - z(0)));
  if (zq >= z(N - 1)) return v2 - deviation(N - 1) * std::exp(-kappa_plus * (zq - z(N - 1)));
  const double xi_max = std::tanh(z(N - 1) / stretch);
  const double dxi = 2.0 * xi_max / static_cast<double>(N - 1);
  Eigen::Index j = static_cast<Eigen::Index>(std::floor((std::tanh(zq / stretch) + xi_max) / dxi));
  j = std::clamp<Eigen::Index>(j, 0, N - 2);
  while (j > 0 && zq < z(j)) --j;
  while (j < N - 2 && zq > z(j + 1)) ++j;
  const double hz = z(j + 1) - z(j);
  const double t = (zq - z(j)) / hz;
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  if (j < c) {
    return h00 * deviation(j) + h10 * hz * dV0(j) + h01 * deviation(j + 1) + h11 * hz * dV0(j + 1);
  }
  const double w = h00 * deviation(j) - h10 * hz * dV0(j) + h01 * deviation(j + 1) - h11 * hz * dV0(j + 1);
  return v2 - w;
}

Heteroclinic heteroclinic(double lambda, const Params& P, const HeteroclinicOptions& opt) {
  const auto window = model::admissible(P).lambda_window;
  if (!(lambda > window.first && lambda < window.second)) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside the window (" << window.first << ", " << window.second << ")";
    throw Error(ErrorKind::NoRealRoots, os.str());
  }
  const model::Equilibria eq = model::equilibria_of_lambda(lambda, P);
  Heteroclinic H;
  H.lambda = lambda;
  H.v1 = eq.v1;
  H.v2 = eq.v2;
  H.gap = analytic::maxwell_gap(lambda, P);
  if (std::abs(H.gap) > opt.gap_tol) {
    std::ostringstream os;
    os << "equal-area gap " << H.gap << " exceeds tolerance " << opt.gap_tol
       << "; no saddle connection at lambda = " << lambda;
    throw Error(ErrorKind::Unbalanced, os.str());
  }
  H.kappa_minus = std::sqrt(-model::deriv_bundle(0.0, lambda, P).f_v);
  H.kappa_plus = std::sqrt(-model::deriv_bundle(eq.v2, lambda, P).f_v);
  H.Z = opt.Z > 0.0 ? opt.Z : 40.0 / std::min(H.kappa_minus, H.kappa_plus);
  H.stretch = H.Z / 2.5;

  const int N = opt.nodes % 2 == 1 ? opt.nodes : opt.nodes + 1;
  const int c = (N - 1) / 2;
  const double xi_max = std::tanh(H.Z / H.stretch);
  H.z.resize(N);
  for (int j = 0; j < N; ++j) {
    H.z(j) = j == c ? 0.0 : H.stretch * std::atanh(-xi_max + 2.0 * xi_max * j / (N - 1));
  }
  H.z(0) = -H.Z;
  H.z(N - 1) = H.Z;

  const Energy E{P, lambda, eq.v1, eq.v2};
  H.V0.resize(N);
  H.dV0.resize(N);
  H.deviation.resize(N);
  const double half = 0.5 * eq.v2;
  H.V0(c) = half;
  H.deviation(c) = half;
  H.dV0(c) = half * E.right_rate(half);

  auto left = [&](double V) { return E.left_rate(V); };
  auto right = [&](double w) { return -E.right_rate(w); };
  double u = std::log(half);
  for (int j = c - 1; j >= 0; --j) {
    const double dz = H.z(j) - H.z(j + 1);
    u = rk4_log(u, dz, std::max(1, static_cast<int>(std::ceil(std::abs(dz) / opt.max_substep))), left);
    const double V = std::exp(u);
    H.V0(j) = V;
    H.deviation(j) = V;
    H.dV0(j) = V * E.left_rate(V);
  }
  double om = std::log(half);
  for (int j = c + 1; j < N; ++j) {
    const double dz = H.z(j) - H.z(j - 1);
    om = rk4_log(om, dz, std::max(1, static_cast<int>(std::ceil(std::abs(dz) / opt.max_substep))), right);
    const double w = std::exp(om);
    H.V0(j) = eq.v2 - w;
    H.deviation(j) = w;
    H.dV0(j) = w * E.right_rate(w);
  }
  return H;
}

double first_integral_drift(const Heteroclinic& H, const Params& P) {
  const int N = static_cast<int>(H.z.size());
  const int c = (N - 1) / 2;
  const bool smooth_centre = std::abs(H.gap) <= 1e-9;
  const Energy E{P, H.lambda, H.v1, H.v2};
  double drift = 0.0;
  for (int j = 0; j < N; ++j) {
    int lo = 0, hi = N - 1;
    if (!smooth_centre) {
      if (j < c) hi = c;
      else if (j > c) lo = c;
      else continue;
    }
    int a = std::clamp(j - 2, lo, hi - 4);
    std::vector<double> xs(5);
    for (int i = 0; i < 5; ++i) xs[i] = H.z(a + i);
    const std::vector<double> w = fd_weights(H.z(j), xs);
    // Differentiate the deviation so tail values keep full relative precision.
    double d = 0.0;
    for (int i = 0; i < 5; ++i) {
      const int idx = a + i;
      const double val = idx <= c ? H.deviation(idx) : H.v2 - H.deviation(idx);
      d += w[i] * val;
    }
    double level;
    if (j <= c) {
      const double V = H.deviation(j);
      level = 0.5 * d * d + V * V * E.phi_sq(V);
    } else {
      const double wv = H.deviation(j);
      level = 0.5 * d * d - wv * wv * E.e_sq(wv);
    }
    drift = std::max(drift, std::abs(level));
  }
  return drift;
}

double tail_log_slope(const Heteroclinic& H, bool right, double z_from, double z_to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (Eigen::Index j = 0; j < H.z.size(); ++j) {
    const double z = H.z(j);
    if ((right && z <= 0.0) || (!right && z >= 0.0)) continue;
    const double a = std::abs(z);
    if (a < z_from || a > z_to) continue;
    const double y = std::log(H.deviation(j));
    sx += a;
    sy += y;
    sxx += a * a;
    sxy += a * y;
    ++cnt;
  }
  if (cnt < 2) throw Error(ErrorKind::InsufficientData, "not enough nodes in the tail window");
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return -slope;
}

double plateau_cutoff(double y, double Lstar) {
  const double q = 0.25 * Lstar;
  const double t = (std::abs(y) - q) / q;
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return b / (a + b);
}

LayerAnsatz compose_ansatz(const Heteroclinic& H, double x0, double eps, const Grid& grid) {
  const double L = grid.length();
  if (!(x0 > 0.0 && x0 < L) || !(eps > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "ansatz needs 0 < x0 < L and eps > 0");
  }
  LayerAnsatz A;
  A.x0 = x0;
  A.eps = eps;
  A.lambda = H.lambda;
  A.v2 = H.v2;
  A.Lstar = std::min(x0, L - x0);
  A.grid = grid;
  const int m = grid.size();
  A.V_eps.resize(m);
  A.chi0.resize(m);
  A.chi1.resize(m);
  const double se = std::sqrt(eps);
  for (int i = 0; i < m; ++i) {
    const double y = grid.node(i) - x0;
    const double c0 = plateau_cutoff(y, A.Lstar);
    const double c1 = y <= 0.0 ? 0.0 : H.v2 * (1.0 - c0);
    A.chi0(i) = c0;
    A.chi1(i) = c1;
    A.V_eps(i) = (c0 == 0.0 ? 0.0 : c0 * H.value(y / se)) + c1;
  }
  return A;
}

ResidualG residual_G(const LayerAnsatz& ansatz, double lambda, const Params& P) {
  ResidualG out;
  out.profile = discretize::pde_residual(ansatz.grid, ansatz.V_eps, lambda, ansatz.eps, P) / std::sqrt(ansatz.eps);
  out.sup_G = out.profile.lpNorm<Eigen::Infinity>();
  return out;
}

double constraint_I(double /*eps*/, double lambda, const VectorXd& v, const Grid& grid, const Params& P) {
  VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) g(i) = model::constraint_g(v(i), lambda, P);
  return discretize::trapezoid(grid, g);
}

int default_layer_cells(double eps, const Params& P, const LayerOptions& opt) {
  const double per = opt.min_nodes_per_sqrt_eps * P.L / std::sqrt(eps);
  return std::max(400, static_cast<int>(std::ceil(per)));
}

double crossing(const Grid& grid, const VectorXd& v, double level) {
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double a = v(i) - level, b = v(i + 1) - level;
    if (a == 0.0) return grid.node(i);
    if ((a < 0.0) != (b < 0.0)) return grid.node(i) + grid.spacing() * a / (a - b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

LayerReport layer_solve(double x0, double eps, const Params& P, const LayerOptions& opt) {
  const analytic::LayerTargets targets = analytic::layer_targets(x0, P);
  if (!(eps > 0.0 && eps <= opt.eps_max)) {
    std::ostringstream os;
    os << "layer construction needs 0 < eps <= " << opt.eps_max << " (got " << eps << ")";
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  const int n = opt.n > 0 ? opt.n : default_layer_cells(eps, P, opt);
  const Grid grid(n, P.L);
  const double lam0 = targets.lambda0_bar;

  HeteroclinicOptions relaxed = opt.het;
  relaxed.gap_tol = std::numeric_limits<double>::infinity();
  const Heteroclinic H0 = heteroclinic(lam0, P, relaxed);
  const LayerAnsatz seed = compose_ansatz(H0, x0, eps, grid);

  solve::NewtonOptions no;
  no.tol = opt.tol;
  no.max_iter = opt.max_iter;
  solve::NewtonTrace trace;
  State sol;
  try {
    sol = solve::newton(State{seed.V_eps, lam0, grid}, eps, P, no, &trace);
  } catch (const Error& e) {
    throw Error(ErrorKind::SeedRejected, std::string("Newton failed from the layer ansatz: ") + e.what());
  }

  LayerReport r;
  r.state = sol;
  r.eps = eps;
  r.x0 = x0;
  r.n = n;
  r.targets = targets;
  r.lambda_eps = sol.lambda;
  r.newton_iterations = trace.iterations;
  r.v0 = sol.v(0);
  r.vL = sol.v(grid.size() - 1);
  r.v2_at_lambda_eps = model::equilibria_of_lambda(sol.lambda, P).v2;
  r.layer_x = crossing(grid, sol.v, 0.5 * r.v2_at_lambda_eps);
  r.maxwell_gap_at_lambda0 = analytic::maxwell_gap(lam0, P);
  r.maxwell_gap_at_lambda_eps = analytic::maxwell_gap(sol.lambda, P);
  r.constraint_residual = constraint_I(eps, sol.lambda, sol.v, grid, P);
  r.sup_dev_seed = (sol.v - seed.V_eps).lpNorm<Eigen::Infinity>();
  if (std::isfinite(r.layer_x) && r.layer_x > 0.0 && r.layer_x < P.L) {
    const Heteroclinic H = heteroclinic(sol.lambda, P, relaxed);
    r.sup_dev = (sol.v - compose_ansatz(H, r.layer_x, eps, grid).V_eps).lpNorm<Eigen::Infinity>();
  } else {
    r.sup_dev = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

State reflect_extend(const State& S) {
  const int n = S.grid.cells();
  const Grid g2(2 * n, 2.0 * S.grid.length());
  VectorXd v(2 * n + 1);
  v.head(n + 1) = S.v;
  for (int i = 1; i <= n; ++i) v(n + i) = S.v(n - i);
  return State{v, S.lambda, g2};
}

}  // namespace shadowkit::layer
