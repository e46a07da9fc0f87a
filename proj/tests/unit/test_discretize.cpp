#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "shadowkit/discretize.hpp"
#include "shadowkit/error.hpp"

using namespace shadowkit;
using namespace shadowkit::discretize;
using Catch::Approx;
using std::numbers::pi;

namespace {

State constant(const Grid& g, double v, double lambda) { return {Eigen::VectorXd::Constant(g.size(), v), lambda, g}; }

double max_rel_jacobian_error(const State& S, double eps, const Params& P) {
  Eigen::VectorXd x(S.v.size() + 1);
  x << S.v, S.lambda;
  auto F = [&](const Eigen::VectorXd& y) {
    State T{y.head(S.v.size()), y(S.v.size()), S.grid};
    return residual(T, eps, P);
  };
  const Eigen::MatrixXd fdJ = oracle::fd_jacobian(F, x);
  const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian(S, eps, P));
  return (J - fdJ).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("grid geometry", "[discretize]") {
  Grid g(7, 2.5);
  CHECK(g.size() == 8);
  CHECK(g.spacing() * g.cells() == Approx(2.5).epsilon(1e-15));
  auto x = g.nodes();
  CHECK(x(0) == 0.0);
  CHECK(x(7) == Approx(2.5).epsilon(1e-15));
  for (int i = 1; i < g.size(); ++i) CHECK(x(i) > x(i - 1));
  CHECK(g.weights().sum() == Approx(2.5).epsilon(1e-14));
  CHECK(g.weights()(0) == Approx(g.spacing() / 2));
}

TEST_CASE("residual at trivial and constant states", "[discretize]") {
  const Params PA = oracle::PA();
  Grid g(50, PA.L);
  for (double eps : {1e-3, 0.07, 4.0}) {
    CHECK(residual(constant(g, 1.0, 3.0), eps, PA).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(residual(constant(g, 0.0, PA.a1 / PA.b1), eps, PA).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const Params PB = oracle::PB();
  Eigen::VectorXd r = residual(constant(g, 1.0, 0.0), 0.3, PB);
  for (int i = 0; i <= g.cells(); ++i) CHECK(r(i) == Approx(3.0).epsilon(1e-14));
  CHECK(r(g.size()) == Approx(0.0).margin(1e-15));
}

TEST_CASE("residual checks dimensions", "[discretize]") {
  Grid g(10, 1.0);
  State S{Eigen::VectorXd::Ones(5), 1.0, g};
  try {
    residual(S, 0.1, oracle::PB());
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("jacobian at the P_B constant state", "[discretize]") {
  Grid g(20, 1.0);
  const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian(constant(g, 1.0, 6.0), 0.05, oracle::PB()));
  const double h = g.spacing();
  CHECK(J(5, 5) == Approx(0.5 - 2 * 0.05 / (h * h)).epsilon(1e-13));
  for (int i = 0; i <= 20; ++i) CHECK(J(i, 21) == Approx(-0.5).epsilon(1e-14));
  CHECK(J(21, 21) == 0.0);
  CHECK(J(21, 3) == Approx(-0.5 * h).epsilon(1e-14));
}

TEST_CASE("jacobian matches finite differences over random states", "[discretize][property]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const Params& P : {oracle::PA(), oracle::PB()}) {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Grid g(30, P.L);
      State S{Eigen::VectorXd(g.size()), 1.0 + 5.0 * U(rng), g};
      for (int i = 0; i < g.size(); ++i) S.v(i) = 0.05 + 3.0 * U(rng);
      worst = std::max(worst, max_rel_jacobian_error(S, 1e-3 + 0.1 * U(rng), P));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("trivial state has a nonsingular jacobian", "[discretize]") {
  const Params P = oracle::PA();
  Grid g(40, P.L);
  const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian(constant(g, 0.0, P.a1 / P.b1), 5.0, P));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  CHECK(svd.singularValues().minCoeff() > 1e-3);
}

TEST_CASE("second difference annihilates constants", "[discretize]") {
  Grid g(13, 0.7);
  CHECK(second_difference(g, Eigen::VectorXd::Constant(g.size(), 3.3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("amplitude of modes", "[discretize]") {
  const Params P = oracle::PB();
  for (int n : {40, 200}) {
    Grid g(n, P.L);
    const Eigen::VectorXd x = g.nodes();
    State S = constant(g, 1.0, 6.0);
    CHECK(amplitude(S, 1, P) == Approx(0.0).margin(1e-15));
    S.v = (1.0 + 0.01 * (pi * x.array() / P.L).cos()).matrix();
    CHECK(amplitude(S, 1, P) == Approx(0.01).epsilon(2.0 / (n * n)));
    S.v = (1.0 + 0.01 * (2 * pi * x.array() / P.L).cos()).matrix();
    CHECK(amplitude(S, 1, P) == Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("manufactured profile residual converges at second order", "[discretize]") {
  // v = 1 + d cos(pi x) solves eps v'' + f = r(x) with r known pointwise; compare rows against it.
  const Params P = oracle::PB();
  const double d = 0.1, eps = 0.02, lam = 6.0;
  std::vector<double> errs;
  for (int n : {50, 100, 200, 400}) {
    Grid g(n, P.L);
    const Eigen::VectorXd x = g.nodes();
    Eigen::VectorXd v = (1.0 + d * (pi * x.array()).cos()).matrix();
    Eigen::VectorXd rows = pde_residual(g, v, lam, eps, P);
    double e = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double exact = -eps * pi * pi * d * std::cos(pi * x(i)) + model::reaction_f(v(i), lam, P);
      e = std::max(e, std::abs(rows(i) - exact));
    }
    errs.push_back(e);
  }
  for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i - 1] / errs[i] == Approx(4.0).epsilon(0.02));
}

TEST_CASE("discrete bifurcation value and Neumann eigenvalue", "[discretize]") {
  const Params P = oracle::PB();
  Grid g(100, P.L);
  const double h = g.spacing();
  const double mu = std::pow(2.0 / h * std::sin(pi * h / 2.0), 2);
  CHECK(neumann_eigenvalue(g, 1) == Approx(mu).epsilon(1e-14));
  CHECK(discrete_bifurcation_eps(g, 1, P) == Approx(0.5 / mu).epsilon(1e-14));
  // The sampled cosine is an exact eigenvector of D2.
  const Eigen::VectorXd c = cosine_mode(g, 2);
  CHECK((second_difference(g, c) + neumann_eigenvalue(g, 2) * c).cwiseAbs().maxCoeff() <= 1e-9);
}
