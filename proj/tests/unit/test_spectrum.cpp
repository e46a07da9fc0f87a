#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "shadowkit/analytic.hpp"
#include "shadowkit/error.hpp"
#include "shadowkit/spectrum.hpp"

using namespace shadowkit;
using namespace shadowkit::spectrum;
using Catch::Approx;
using std::numbers::pi;

namespace {

State constant(const Grid& g, double v, double lambda) { return {Eigen::VectorXd::Constant(g.size(), v), lambda, g}; }

}  // namespace

TEST_CASE("linearized matrix equals the jacobian", "[spectrum]") {
  const Params P = oracle::PA();
  Grid g(30, P.L);
  State S = constant(g, 1.2, 2.9);
  S.v(4) = 0.8;
  CHECK((linearized_matrix(S, 0.03, P) - Eigen::MatrixXd(discretize::jacobian(S, 0.03, P))).norm() == 0.0);
}

TEST_CASE("kernel at the discrete bifurcation value is the cosine mode", "[spectrum]") {
  const Params P = oracle::PB();
  Grid g(100, P.L);
  for (int k = 1; k <= 3; ++k) {
    const double eps = discretize::discrete_bifurcation_eps(g, k, P);
    const Eigen::MatrixXd J = linearized_matrix(constant(g, 1.0, 6.0), eps, P);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    lu.setThreshold(1e-9);
    REQUIRE(lu.rank() == J.rows() - 1);
    Eigen::VectorXd ker = lu.kernel().col(0);
    ker /= ker.head(g.size()).cwiseAbs().maxCoeff();
    const Eigen::VectorXd c = discretize::cosine_mode(g, k);
    const double sign = ker(0) > 0 ? 1.0 : -1.0;
    CHECK((sign * ker.head(g.size()) - c).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(ker(g.size())) <= 1e-8);
  }
}

TEST_CASE("trivial state linearization is nonsingular", "[spectrum]") {
  const Params P = oracle::PA();
  Grid g(60, P.L);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(linearized_matrix(constant(g, 0.0, P.a1 / P.b1), 0.047, P));
  CHECK(svd.singularValues().minCoeff() > 1e-4);
}

TEST_CASE("spectrum is invariant under reflection", "[spectrum]") {
  const Params P = oracle::PA();
  Grid g(40, P.L);
  const Eigen::VectorXd x = g.nodes();
  State S{(1.0 + 0.3 * x.array() * x.array()).matrix(), 3.1, g};
  State R{S.v.reverse(), S.lambda, g};
  auto a = leading_spectrum(linearized_matrix(S, 0.02, P), 10);
  auto b = leading_spectrum(linearized_matrix(R, 0.02, P), 10);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10 * std::max(1.0, std::abs(a[i])));
  CHECK(leading_real_part(S, 0.02, P) == Approx(leading_real_part(R, 0.02, P)).margin(1e-10));
}

TEST_CASE("leading_spectrum ordering", "[spectrum]") {
  CHECK(leading_spectrum(Eigen::MatrixXd::Zero(5, 5), 5) == std::vector<std::complex<double>>(5, 0.0));
  Eigen::MatrixXd m(4, 4);
  m << 0, -1, 0, 0,  //
      1, 0, 0, 0,    //
      0, 0, -3, 0,   //
      0, 0, 0, 2;
  auto ev = leading_spectrum(m, 4);
  CHECK(ev[0].real() == Approx(2.0));
  CHECK(ev[1].imag() == Approx(1.0));
  CHECK(ev[2].imag() == Approx(-1.0));
  CHECK(ev[3].real() == Approx(-3.0));
}

TEST_CASE("constant state stability across the first bifurcation", "[spectrum]") {
  // With b1 = 0 the constrained modes are cos(k pi x) with eigenvalue f_v - eps mu_k.
  const Params P = oracle::PB();
  Grid g(100, P.L);
  const State S = constant(g, 1.0, 6.0);
  const double e1 = analytic::bifurcation_eps(1, P), e2 = analytic::bifurcation_eps(2, P);
  CHECK(is_stable(S, 1.2 * e1, P));
  CHECK(leading_real_part(S, 1.2 * e1, P) == Approx(0.5 - 1.2 * e1 * discretize::neumann_eigenvalue(g, 1)).epsilon(1e-9));
  const double mid = 0.5 * (e1 + e2);
  auto ev = stability_spectrum(S, mid, P, 3);
  CHECK(ev[0].real() > 0.0);
  CHECK(ev[1].real() < 0.0);
  CHECK_FALSE(is_stable(S, mid, P));
}

TEST_CASE("eigenvalue crossings are decreasing in eps", "[spectrum]") {
  const Params P = oracle::PB();
  Grid g(100, P.L);
  const State S = constant(g, 1.0, 6.0);
  for (int k = 1; k <= 3; ++k) {
    const double ek = discretize::discrete_bifurcation_eps(g, k, P);
    auto mode_eig = [&](double eps) {
      // The k-th constrained eigenvalue sorted from the top.
      return stability_spectrum(S, eps, P, k)[k - 1].real();
    };
    CHECK(mode_eig(0.98 * ek) > 0.0);
    CHECK(mode_eig(1.02 * ek) < 0.0);
    const double slope = (mode_eig(1.001 * ek) - mode_eig(0.999 * ek)) / (0.002 * ek);
    CHECK(slope == Approx(-discretize::neumann_eigenvalue(g, k)).epsilon(1e-6));
    CHECK(slope == Approx(analytic::mu_dot(k, P)).epsilon(2e-3));
  }
}

TEST_CASE("indeterminate stability at the bifurcation point", "[spectrum]") {
  const Params P = oracle::PB();
  Grid g(100, P.L);
  const double eps = discretize::discrete_bifurcation_eps(g, 1, P);
  try {
    is_stable(constant(g, 1.0, 6.0), eps, P);
    FAIL("expected Indeterminate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Indeterminate);
  }
}

TEST_CASE("middle equilibrium is unstable at frozen lambda", "[spectrum]") {
  const Params P = oracle::PB();
  Grid g(50, P.L);
  auto e = model::equilibria_of_lambda(6.0, P);
  CHECK_FALSE(is_stable_fixed_lambda(g, Eigen::VectorXd::Constant(g.size(), e.v1), 6.0, 1e-3, P));
  CHECK(is_stable_fixed_lambda(g, Eigen::VectorXd::Constant(g.size(), e.v2), 6.0, 1e-3, P));
}

TEST_CASE("constrained matrix with a nonzero corner", "[spectrum]") {
  // b1 > 0: Schur complement route. Its spectrum must be that of the generalized problem.
  const Params P = oracle::PA();
  Grid g(20, P.L);
  State S = constant(g, 1.0, 3.0);
  S.v(3) = 1.1;
  const Eigen::MatrixXd J = linearized_matrix(S, 0.05, P);
  const int n = g.size();
  const Eigen::MatrixXd M = constrained_matrix(S, 0.05, P);
  REQUIRE(M.rows() == n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(J, B);
  std::vector<double> finite;
  for (int i = 0; i <= n; ++i)
    if (std::abs(ges.betas()(i)) > 1e-12) finite.push_back((ges.alphas()(i) / ges.betas()(i)).real());
  std::sort(finite.rbegin(), finite.rend());
  auto ev = leading_spectrum(M, 3);
  REQUIRE(finite.size() >= 3);
  for (int i = 0; i < 3; ++i) CHECK(ev[i].real() == Approx(finite[i]).epsilon(1e-8));
}
