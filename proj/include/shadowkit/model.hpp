#pragma once

#include <utility>

namespace shadowkit::model {

/**
 * @brief Reaction coefficients and domain length of the shadow problem
 *
 *   eps v'' + f(v, lambda) = 0 on (0, L),  v'(0) = v'(L) = 0,
 *   int_0^L g(v, lambda) dx = 0.
 *
 * The ratios A, B, C are derived on demand.
 */
struct Params {
  double a1 = 0.0;
  double b1 = 0.0;
  double c1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  double c2 = 0.0;
  double L = 1.0;

  double A() const { return a1 / a2; }
  double B() const { return b1 / b2; }
  double C() const { return c1 / c2; }

  /// Throws InvalidParams unless a1, c1, a2, b2, c2, L > 0 and b1 >= 0.
  void validate() const;
};

struct ConstantState {
  double v_bar = 0.0;
  double lambda_bar = 0.0;
};

/// Partial derivatives of f and g at one point (v, lambda).
struct DerivBundle {
  double f_v = 0.0;
  double f_lambda = 0.0;
  double f_vlambda = 0.0;
  double f_vv = 0.0;
  double f_vvv = 0.0;
  double g_v = 0.0;
  double g_lambda = 0.0;
  double g_vv = 0.0;
};

/// Zeros of f(., lambda): 0 < v1 <= v2 inside the lambda window.
struct Equilibria {
  double v0 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
};

struct Admissibility {
  bool ordering = false;              ///< B > A > C or B < A < C
  bool bifurcation_positive = false;  ///< a2 > c2 and v_bar < (a2 - c2)/(2 c2)
  std::pair<double, double> lambda_window{0.0, 0.0};
};

double reaction_f(double v, double lambda, const Params& P);
double constraint_g(double v, double lambda, const Params& P);

/// Primitive int_0^v f(u, lambda) du in closed form.
double reaction_potential(double v, double lambda, const Params& P);

DerivBundle deriv_bundle(double v, double lambda, const Params& P);

/// Throws OrderingViolated when no positive constant state exists.
ConstantState constant_state(const Params& P);

/// Throws NoRealRoots above (a2 + c2)^2 / (4 b2 c2).
Equilibria equilibria_of_lambda(double lambda, const Params& P);

Admissibility admissible(const Params& P);

}  // namespace shadowkit::model
