#include "shadowkit/discretize.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "shadowkit/error.hpp"

namespace shadowkit::discretize {

Grid::Grid(int n, double L) : n_(n), L_(L) {
  if (n < 2 || !(L > 0.0)) {
    std::ostringstream os;
    os << "grid needs n >= 2 and L > 0 (n=" << n << ", L=" << L << ")";
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  const double h = spacing();
  w_ = Eigen::VectorXd::Constant(n + 1, h);
  w_(0) = w_(n) = 0.5 * h;
}

double Grid::node(int i) const { return i == n_ ? L_ : i * spacing(); }

Eigen::VectorXd Grid::nodes() const {
  Eigen::VectorXd x(n_ + 1);
  for (int i = 0; i <= n_; ++i) x(i) = node(i);
  return x;
}

namespace {

void check_dims(const Grid& grid, const Eigen::VectorXd& v) {
  if (v.size() != grid.size()) {
    std::ostringstream os;
    os << "profile has " << v.size() << " entries, grid has " << grid.size() << " nodes";
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

// Triplets of eps D2 + diag(f_v) on rows 0..n.
void push_pde_block(std::vector<Eigen::Triplet<double>>& t, const Grid& grid, const Eigen::VectorXd& v,
                    double lambda, double eps, const Params& P) {
  const int n = grid.cells();
  const double h = grid.spacing();
  const double s = eps / (h * h);
  for (int i = 0; i <= n; ++i) {
    const double fv = model::deriv_bundle(v(i), lambda, P).f_v;
    t.emplace_back(i, i, -2.0 * s + fv);
    if (i == 0) {
      t.emplace_back(0, 1, 2.0 * s);
    } else if (i == n) {
      t.emplace_back(n, n - 1, 2.0 * s);
    } else {
      t.emplace_back(i, i - 1, s);
      t.emplace_back(i, i + 1, s);
    }
  }
}

}  // namespace

Eigen::VectorXd second_difference(const Grid& grid, const Eigen::VectorXd& v) {
  check_dims(grid, v);
  const int n = grid.cells();
  const double ih2 = 1.0 / (grid.spacing() * grid.spacing());
  Eigen::VectorXd d(n + 1);
  d(0) = 2.0 * (v(1) - v(0)) * ih2;
  d(n) = 2.0 * (v(n - 1) - v(n)) * ih2;
  for (int i = 1; i < n; ++i) d(i) = (v(i - 1) - 2.0 * v(i) + v(i + 1)) * ih2;
  return d;
}

double trapezoid(const Grid& grid, const Eigen::VectorXd& values) {
  check_dims(grid, values);
  return grid.weights().dot(values);
}

Eigen::VectorXd pde_residual(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                             const Params& P) {
  Eigen::VectorXd r = eps * second_difference(grid, v);
  for (int i = 0; i < r.size(); ++i) r(i) += model::reaction_f(v(i), lambda, P);
  return r;
}

SparseMatrix pde_jacobian(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                          const Params& P) {
  check_dims(grid, v);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * grid.size());
  push_pde_block(t, grid, v, lambda, eps, P);
  SparseMatrix J(grid.size(), grid.size());
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

Eigen::VectorXd residual(const State& S, double eps, const Params& P) {
  const int m = S.grid.size();
  Eigen::VectorXd r(m + 1);
  r.head(m) = pde_residual(S.grid, S.v, S.lambda, eps, P);
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) g(i) = model::constraint_g(S.v(i), S.lambda, P);
  r(m) = trapezoid(S.grid, g);
  return r;
}

SparseMatrix jacobian(const State& S, double eps, const Params& P) {
  check_dims(S.grid, S.v);
  const int m = S.grid.size();
  const Eigen::VectorXd& w = S.grid.weights();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * m + 1);
  push_pde_block(t, S.grid, S.v, S.lambda, eps, P);
  double g_lambda = 0.0;
  for (int i = 0; i < m; ++i) {
    const model::DerivBundle d = model::deriv_bundle(S.v(i), S.lambda, P);
    t.emplace_back(i, m, d.f_lambda);
    t.emplace_back(m, i, w(i) * d.g_v);
    g_lambda += w(i) * d.g_lambda;
  }
  t.emplace_back(m, m, g_lambda);
  SparseMatrix J(m + 1, m + 1);
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

Eigen::VectorXd residual_eps(const State& S) {
  const int m = S.grid.size();
  Eigen::VectorXd r(m + 1);
  r.head(m) = second_difference(S.grid, S.v);
  r(m) = 0.0;
  return r;
}

Eigen::VectorXd cosine_mode(const Grid& grid, int k) {
  Eigen::VectorXd c(grid.size());
  const double w = k * std::numbers::pi / grid.length();
  for (int i = 0; i < grid.size(); ++i) c(i) = std::cos(w * grid.node(i));
  return c;
}

double amplitude(const State& S, int k, const Params& P) {
  const double v_bar = model::constant_state(P).v_bar;
  const Eigen::VectorXd dev = S.v.array() - v_bar;
  return (2.0 / S.grid.length()) * trapezoid(S.grid, dev.cwiseProduct(cosine_mode(S.grid, k)));
}

double neumann_eigenvalue(const Grid& grid, int k) {
  const double h = grid.spacing();
  const double s = (2.0 / h) * std::sin(k * std::numbers::pi * h / (2.0 * grid.length()));
  return s * s;
}

double discrete_bifurcation_eps(const Grid& grid, int k, const Params& P) {
  const model::ConstantState cs = model::constant_state(P);
  const double fv = model::deriv_bundle(cs.v_bar, cs.lambda_bar, P).f_v;
  if (!(fv > 0.0)) throw Error(ErrorKind::NotPositive, "f_v at the constant state is not positive");
  return fv / neumann_eigenvalue(grid, k);
}

}  // namespace shadowkit::discretize
