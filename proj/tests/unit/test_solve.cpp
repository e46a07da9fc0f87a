#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "shadowkit/analytic.hpp"
#include "shadowkit/error.hpp"
#include "shadowkit/layer.hpp"
#include "shadowkit/solve.hpp"

using namespace shadowkit;
using namespace shadowkit::solve;
using Catch::Approx;
using std::numbers::pi;

namespace {

Eigen::VectorXd constant(const Grid& g, double v) { return Eigen::VectorXd::Constant(g.size(), v); }

}  // namespace

TEST_CASE("newton from the exact constant state takes no iterations", "[solve]") {
  const Params P = oracle::PA();
  Grid g(100, P.L);
  NewtonTrace tr;
  State S = newton({constant(g, 1.0), 3.0, g}, 0.02, P, {}, &tr);
  CHECK(tr.iterations == 0);
  CHECK(S.lambda == 3.0);
}

TEST_CASE("newton returns to the constant state away from bifurcation values", "[solve]") {
  const Params P = oracle::PA();
  Grid g(200, P.L);
  const Eigen::VectorXd x = g.nodes();
  // Perturbation with no weight on the cosine modes: a narrow spike averaged out of mode k.
  Eigen::VectorXd v = constant(g, 1.0);
  for (int i = 0; i < g.size(); ++i) v(i) += 1e-3 * std::exp(-std::pow((x(i) - 0.37) / 0.02, 2));
  const double eps = 0.3;  // above eps_1 = 1/(2 pi^2)
  State S = newton({v, 3.0, g}, eps, P);
  CHECK((S.v.array() - 1.0).abs().maxCoeff() <= 1e-9);
  CHECK(S.lambda == Approx(3.0).epsilon(1e-10));
  CHECK(std::abs(discretize::amplitude(S, 1, P)) <= 1e-10);
  CHECK(std::abs(discretize::residual(S, eps, P)(g.size())) <= 1e-10);
}

TEST_CASE("newton converges quadratically near a regular solution", "[solve]") {
  const Params P = oracle::PA();
  Grid g(200, P.L);
  const Eigen::VectorXd x = g.nodes();
  Eigen::VectorXd v = (1.0 + 1e-2 * (3.0 * pi * x.array()).cos() + 1e-2 * (x.array() - 0.5)).matrix();
  NewtonOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 20;
  NewtonTrace tr;
  try {
    newton({v, 3.01, g}, 0.3, P, opt, &tr);
  } catch (const Error&) {
    // Round-off may prevent 1e-14; the trace still holds the iterates.
  }
  const auto& r = tr.residual_norms;
  REQUIRE(r.size() >= 3);
  int checked = 0;
  for (std::size_t k = 1; k + 1 < r.size(); ++k) {
    if (r[k] < 1e-12 || r[k + 1] < 1e-13) break;
    CHECK(r[k + 1] / (r[k] * r[k]) < 1e3);
    ++checked;
  }
  CHECK(checked >= 1);
  CHECK(r.back() < 1e-11);
}

TEST_CASE("constraint row drives lambda away from zero", "[solve]") {
  const Params P = oracle::PB();
  Grid g(60, P.L);
  CHECK(std::abs(discretize::residual({constant(g, P.a2 / P.c2), 0.0, g}, 0.2, P)(g.size())) > 0.1);
  NewtonOptions opt;
  opt.max_iter = 100;
  State S = newton({constant(g, P.a2 / P.c2), 0.0, g}, 0.2, P, opt);
  CHECK(S.lambda == Approx(6.0).epsilon(1e-10));
  CHECK((S.v.array() - 1.0).abs().maxCoeff() <= 1e-10);
  CHECK(discretize::residual(S, 0.2, P).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("solve_fixed_lambda keeps constant equilibria", "[solve]") {
  const Params P = oracle::PB();
  Grid g(80, P.L);
  auto e = model::equilibria_of_lambda(5.5, P);
  NewtonTrace tr;
  CHECK((solve_fixed_lambda(g, constant(g, e.v2), 5.5, 1e-3, P, {}, &tr).array() - e.v2).abs().maxCoeff() <= 1e-12);
  CHECK((solve_fixed_lambda(g, constant(g, e.v1), 5.5, 1e-3, P).array() - e.v1).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("relax_oracle equilibria", "[solve]") {
  const Params P = oracle::PB();
  Grid g(50, P.L);
  const Eigen::VectorXd up = relax_oracle(g, constant(g, 2.01), 6.0, 1e-2, P, 200.0);
  CHECK((up.array() - 2.0).abs().maxCoeff() <= 1e-9);
  const Eigen::VectorXd zero = relax_oracle(g, constant(g, 0.0), 6.0, 1e-2, P, 1.0);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("relax_oracle reports blow-up", "[solve]") {
  Params P = oracle::PB();
  Grid g(20, P.L);
  try {
    // With lambda = 0, f < 0 below zero, so the state runs into the singularity at v = -1.
    relax_oracle(g, constant(g, -0.9), 0.0, 1e-2, P, 1e3);
    FAIL("expected Blowup");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Blowup);
  }
}

TEST_CASE("layered frozen-lambda profile from the ansatz", "[solve]") {
  // At lambda = 6 the front travels, so the stationary layer is sought at the balanced lambda.
  const Params P = oracle::PB();
  const double eps = 1e-4;
  const double lam = analytic::maxwell_lambda(P);
  Grid g(4000, P.L);
  auto H = layer::heteroclinic(lam, P);
  auto A = layer::compose_ansatz(H, 0.25, eps, g);
  const Eigen::VectorXd v = solve_fixed_lambda(g, A.V_eps, lam, eps, P);
  CHECK(v(0) < 0.05);
  CHECK(std::abs(v(g.cells()) - 2.0) < 0.1);
  CHECK(layer::crossing(g, v, H.v2 / 2) == Approx(0.25).margin(1e-3));
  CHECK(discretize::pde_residual(g, v, lam, eps, P).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("relax_oracle and solve_fixed_lambda agree on a smooth fixture", "[solve]") {
  const Params P = oracle::PA();
  Grid g(100, P.L);
  const Eigen::VectorXd x = g.nodes();
  // Frozen lambda = 3 has equilibria 0, 1, 2; start in the basin of 2.
  Eigen::VectorXd init = (2.0 + 0.5 * (pi * x.array()).cos()).matrix();
  const Eigen::VectorXd a = relax_oracle(g, init, 3.0, 0.2, P, 500.0);
  const Eigen::VectorXd b = solve_fixed_lambda(g, init, 3.0, 0.2, P);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((b.array() - 2.0).abs().maxCoeff() <= 1e-10);
}
