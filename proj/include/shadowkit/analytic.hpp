#pragma once

#include <vector>

#include "shadowkit/model.hpp"

namespace shadowkit::analytic {

using model::Params;

/**
 * @brief Coefficients of the pitchfork expansion eps_k(s) = eps_k + K1 s + K2 s^2 + o(s^2).
 *
 * K2 comes from the second-order expansion of the branch. K2_chart is the
 * reduced rational form F(t)/(24 v(1+v)^2 (t - c2)) built on sign_chart's
 * polynomial; the two differ (see README).
 */
struct PitchforkCoeffs {
  int k = 0;
  double eps_k = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K2_chart = 0.0;
  double lambda2_bar = 0.0;
  double int_phi2 = 0.0;
  double int_phi2_cos2k = 0.0;
  double t = 0.0;
};

enum class Regime { VbarBelow4_3, VbarEq4_3, VbarAbove4_3 };

/// F(t) = alpha t^2 + beta t + gamma and its roots on (c2, inf).
struct SignChart {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<double> roots_in_window;
  Regime regime = Regime::VbarBelow4_3;

  double F(double t) const { return (alpha * t + beta) * t + gamma; }
};

enum class Direction { Left, Right };

struct StabilityClass {
  Direction direction = Direction::Left;
  bool stable = false;
  double K2 = 0.0;
};

struct LayerTargets {
  double x1 = 0.0;
  double x2 = 0.0;
  double v2_limit = 0.0;
  double lambda0_bar = 0.0;
  double x0 = 0.0;
};

/// eps_k = (a2 - c2 - 2 c2 v) v / ((1 + v)(k pi / L)^2); NotPositive if that is not positive.
double bifurcation_eps(int k, const Params& P);

/// Requires b1 = 0.
PitchforkCoeffs pitchfork_coeffs(int k, const Params& P);

/// alpha = 3v - 4, beta = -(12v^2 + 7v - 8) c2, gamma = (14v^2 + 4v - 4) c2^2.
SignChart sign_chart(const Params& P);

/// Polynomial whose sign is the sign of the expansion K2:
/// alpha = -(3v + 4), beta = -(12v^2 + v - 8) c2, same gamma.
SignChart expansion_sign_chart(const Params& P);

/// t = b2 lambda / (1 + v)^2 at the constant state.
double t_parameter(const Params& P);

/// Throws Degenerate when |F(t)| <= 1e-8 c2^2 for the expansion polynomial.
StabilityClass classify_stability(int k, const Params& P);

double mu_dot(int k, const Params& P);

LayerTargets layer_targets(double x0, const Params& P);

/// int_0^{v2(lambda)} f(v, lambda) dv by adaptive Gauss-Kronrod.
double maxwell_gap(double lambda, const Params& P);

/// The unique root of maxwell_gap inside the lambda window.
double maxwell_lambda(const Params& P, double rel_tol = 1e-15);

/// lim d I / d lambda for the step profile with a jump at x0.
double constraint_lambda_slope_limit(double x0, double lambda, const Params& P);

}  // namespace shadowkit::analytic
