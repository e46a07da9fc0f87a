#include "shadowkit/analytic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "shadowkit/error.hpp"

namespace shadowkit::analytic {

using model::ConstantState;
using model::DerivBundle;

namespace {

void require_b1_zero(const Params& P, const char* what) {
  if (P.b1 != 0.0) {
    std::ostringstream os;
    os << what << " is only available for b1 = 0 (got b1 = " << P.b1 << ")";
    throw Error(ErrorKind::RequiresB1Zero, os.str());
  }
}

double mode_omega(int k, double L) {
  const double w = k * std::numbers::pi / L;
  return w * w;
}

Regime regime_of(double v_bar) {
  const double d = v_bar - 4.0 / 3.0;
  if (std::abs(d) <= 1e-12 * (4.0 / 3.0)) return Regime::VbarEq4_3;
  return d < 0.0 ? Regime::VbarBelow4_3 : Regime::VbarAbove4_3;
}

void fill_roots(SignChart& chart, double c2) {
  std::vector<double> cand;
  const double a = chart.alpha, b = chart.beta, c = chart.gamma;
  if (chart.regime == Regime::VbarEq4_3 || a == 0.0) {
    if (b != 0.0) cand.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        cand.push_back(q / a);
        cand.push_back(c / q);
      }
    }
  }
  for (double r : cand) {
    for (int it = 0; it < 3; ++it) {
      const double d = 2.0 * a * r + b;
      if (d == 0.0) break;
      r -= chart.F(r) / d;
    }
    if (r > c2) chart.roots_in_window.push_back(r);
  }
  std::sort(chart.roots_in_window.begin(), chart.roots_in_window.end());
}

}  // namespace

double bifurcation_eps(int k, const Params& P) {
  const model::Admissibility adm = model::admissible(P);
  if (!adm.ordering) model::constant_state(P);  // throws OrderingViolated
  if (!adm.bifurcation_positive) {
    throw Error(ErrorKind::NotPositive,
                "a2 > c2 and v_bar < (a2 - c2)/(2 c2) required for positive bifurcation values");
  }
  if (k < 1) throw Error(ErrorKind::InvalidParams, "mode index k must be >= 1");
  const double v = model::constant_state(P).v_bar;
  return (P.a2 - P.c2 - 2.0 * P.c2 * v) * v / ((1.0 + v) * mode_omega(k, P.L));
}

double t_parameter(const Params& P) {
  const ConstantState cs = model::constant_state(P);
  return P.b2 * cs.lambda_bar / ((1.0 + cs.v_bar) * (1.0 + cs.v_bar));
}

SignChart sign_chart(const Params& P) {
  const double v = model::constant_state(P).v_bar;
  SignChart chart;
  chart.alpha = 3.0 * v - 4.0;
  chart.beta = -(12.0 * v * v + 7.0 * v - 8.0) * P.c2;
  chart.gamma = (14.0 * v * v + 4.0 * v - 4.0) * P.c2 * P.c2;
  chart.regime = regime_of(v);
  if (chart.regime == Regime::VbarEq4_3) chart.alpha = 0.0;
  fill_roots(chart, P.c2);
  return chart;
}

SignChart expansion_sign_chart(const Params& P) {
  const double v = model::constant_state(P).v_bar;
  SignChart chart;
  chart.alpha = -(3.0 * v + 4.0);
  chart.beta = -(12.0 * v * v + v - 8.0) * P.c2;
  chart.gamma = (14.0 * v * v + 4.0 * v - 4.0) * P.c2 * P.c2;
  chart.regime = regime_of(v);
  fill_roots(chart, P.c2);
  return chart;
}

PitchforkCoeffs pitchfork_coeffs(int k, const Params& P) {
  require_b1_zero(P, "analytic K2");
  PitchforkCoeffs pc;
  pc.k = k;
  pc.eps_k = bifurcation_eps(k, P);
  const ConstantState cs = model::constant_state(P);
  const DerivBundle d = model::deriv_bundle(cs.v_bar, cs.lambda_bar, P);
  const double L = P.L;
  const double omega = mode_omega(k, L);

  const double det = d.f_v * d.g_lambda - d.f_lambda * d.g_v;
  pc.K1 = 0.0;
  pc.int_phi2_cos2k = L * d.f_vv / (24.0 * pc.eps_k * omega);
  pc.int_phi2 = L * (d.f_lambda * d.g_vv - d.f_vv * d.g_lambda) / (4.0 * det);
  pc.lambda2_bar = (d.f_vv * d.g_v - d.f_v * d.g_vv) / (4.0 * det);
  pc.K2 = (d.f_vv * (pc.int_phi2 + pc.int_phi2_cos2k) / L + d.f_vlambda * pc.lambda2_bar +
           d.f_vvv / 8.0) /
          omega;

  pc.t = t_parameter(P);
  const SignChart chart = sign_chart(P);
  const double v = cs.v_bar;
  pc.K2_chart = (2.0 / omega) * chart.F(pc.t) / (24.0 * v * (1.0 + v) * (1.0 + v) * (pc.t - P.c2));
  return pc;
}

StabilityClass classify_stability(int k, const Params& P) {
  require_b1_zero(P, "stability classification");
  const PitchforkCoeffs pc = pitchfork_coeffs(k, P);
  const SignChart chart = expansion_sign_chart(P);
  if (std::abs(chart.F(pc.t)) <= 1e-8 * P.c2 * P.c2) {
    std::ostringstream os;
    os << "t = " << pc.t << " sits on a root of F; K2 vanishes to leading order";
    throw Error(ErrorKind::Degenerate, os.str());
  }
  StabilityClass sc;
  sc.K2 = pc.K2;
  sc.direction = pc.K2 > 0.0 ? Direction::Right : Direction::Left;
  sc.stable = pc.K2 < 0.0;
  return sc;
}

double mu_dot(int k, const Params& P) { return -mode_omega(k, P.L); }

LayerTargets layer_targets(double x0, const Params& P) {
  require_b1_zero(P, "layer targets");
  P.validate();
  const double a1 = P.a1, c1 = P.c1, a2 = P.a2, c2 = P.c2, L = P.L;
  if (!(a2 - c2 > 2.0 * a1 * c2 / c1)) {
    std::ostringstream os;
    os << "layer hypothesis a2 - c2 > 2 a1 c2 / c1 fails (" << a2 - c2 << " <= " << 2.0 * a1 * c2 / c1
       << ")";
    throw Error(ErrorKind::HypothesisFailed, os.str());
  }
  LayerTargets lt;
  lt.x0 = x0;
  const double den = (a1 + c1) * (a2 - c2);
  lt.x1 = std::max(0.0, ((a2 - c2) * c1 - 2.0 * a1 * c2) * L / den);
  lt.x2 = ((a2 - c2) * c1 - a1 * c2) * L / den;
  if (!(x0 > lt.x1 && x0 < lt.x2)) {
    std::ostringstream os;
    os << "x0 = " << x0 << " outside (" << lt.x1 << ", " << lt.x2 << ")";
    throw Error(ErrorKind::X0OutOfRange, os.str());
  }
  lt.v2_limit = a1 * L / (c1 * L - (a1 + c1) * x0);
  lt.lambda0_bar = (a2 - c2 * lt.v2_limit) * (1.0 + lt.v2_limit) / P.b2;
  return lt;
}

double maxwell_gap(double lambda, const Params& P) {
  const double v2 = model::equilibria_of_lambda(lambda, P).v2;
  auto f = [&](double v) { return model::reaction_f(v, lambda, P); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, v2, 20, 1e-14);
}

double maxwell_lambda(const Params& P, double rel_tol) {
  const auto window = model::admissible(P).lambda_window;
  auto gap = [&](double lam) { return maxwell_gap(lam, P); };
  const double g_lo = gap(window.first);
  const double g_hi = gap(window.second);
  if (!(g_lo > 0.0 && g_hi < 0.0)) {
    throw Error(ErrorKind::Unbalanced, "maxwell gap does not change sign across the lambda window");
  }
  std::uintmax_t max_iter = 200;
  auto tol = [rel_tol](double a, double b) { return std::abs(b - a) <= rel_tol * std::abs(b); };
  const auto br = boost::math::tools::toms748_solve(gap, window.first, window.second, g_lo, g_hi, tol,
                                                    max_iter);
  return 0.5 * (br.first + br.second);
}

double constraint_lambda_slope_limit(double x0, double lambda, const Params& P) {
  const double s = P.a2 + P.c2;
  const double disc = s * s - 4.0 * P.b2 * P.c2 * lambda;
  const double v2 = model::equilibria_of_lambda(lambda, P).v2;
  return (P.a1 + P.c1) * P.b2 * (P.L - x0) / ((1.0 + v2) * (1.0 + v2) * std::sqrt(disc));
}

}  // namespace shadowkit::analytic
