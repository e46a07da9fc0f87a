#include "shadowkit/model.hpp"

#include <cmath>
#include <sstream>

#include "shadowkit/error.hpp"

namespace shadowkit::model {

void Params::validate() const {
  auto bad = [](const char* name, double value) {
    std::ostringstream os;
    os << "parameter " << name << " = " << value << " out of range";
    throw Error(ErrorKind::InvalidParams, os.str());
  };
  if (!(a1 > 0.0)) bad("a1", a1);
  if (!(b1 >= 0.0)) bad("b1", b1);
  if (!(c1 > 0.0)) bad("c1", c1);
  if (!(a2 > 0.0)) bad("a2", a2);
  if (!(b2 > 0.0)) bad("b2", b2);
  if (!(c2 > 0.0)) bad("c2", c2);
  if (!(L > 0.0) || !std::isfinite(L)) bad("L", L);
}

double reaction_f(double v, double lambda, const Params& P) {
  return (P.a2 - P.b2 * lambda / (1.0 + v) - P.c2 * v) * v;
}

double constraint_g(double v, double lambda, const Params& P) {
  const double q = 1.0 + v;
  return (P.a1 - P.c1 * v) / q - P.b1 * lambda / (q * q);
}

double reaction_potential(double v, double lambda, const Params& P) {
  return 0.5 * P.a2 * v * v - P.c2 * v * v * v / 3.0 - P.b2 * lambda * (v - std::log1p(v));
}

DerivBundle deriv_bundle(double v, double lambda, const Params& P) {
  const double q = 1.0 + v;
  const double q2 = q * q;
  const double q3 = q2 * q;
  const double q4 = q3 * q;
  DerivBundle d;
  d.f_v = P.a2 - P.b2 * lambda / q2 - 2.0 * P.c2 * v;
  d.f_lambda = -P.b2 * v / q;
  d.f_vlambda = -P.b2 / q2;
  d.f_vv = 2.0 * P.b2 * lambda / q3 - 2.0 * P.c2;
  d.f_vvv = -6.0 * P.b2 * lambda / q4;
  d.g_v = -(P.a1 + P.c1) / q2 + 2.0 * P.b1 * lambda / q3;
  d.g_lambda = -P.b1 / q2;
  d.g_vv = 2.0 * (P.a1 + P.c1) / q3 - 6.0 * P.b1 * lambda / q4;
  return d;
}

namespace {

bool ordering_holds(const Params& P) {
  const double A = P.A(), B = P.B(), C = P.C();
  return (B > A && A > C) || (B < A && A < C);
}

}  // namespace

ConstantState constant_state(const Params& P) {
  P.validate();
  if (!ordering_holds(P)) {
    std::ostringstream os;
    os << "ordering condition B>A>C or B<A<C fails (A=" << P.A() << ", B=" << P.B()
       << ", C=" << P.C() << "); no positive constant state";
    throw Error(ErrorKind::OrderingViolated, os.str());
  }
  const double A = P.A(), B = P.B(), C = P.C();
  ConstantState cs;
  cs.v_bar = (P.a2 / P.c2) * (B - A) / (B - C);
  cs.lambda_bar = (P.a2 / P.b2) * ((A - C) / (B - C)) * (1.0 + cs.v_bar);
  return cs;
}

Equilibria equilibria_of_lambda(double lambda, const Params& P) {
  const double s = P.a2 + P.c2;
  double disc = s * s - 4.0 * P.b2 * P.c2 * lambda;
  if (std::abs(disc) < 1e-14 * s * s) {
    disc = 0.0;
  } else if (disc < 0.0) {
    std::ostringstream os;
    os << "lambda = " << lambda << " exceeds (a2+c2)^2/(4 b2 c2) = " << s * s / (4.0 * P.b2 * P.c2);
    throw Error(ErrorKind::NoRealRoots, os.str());
  }
  const double r = std::sqrt(disc);
  const double m = P.a2 - P.c2;
  Equilibria e;
  // c2 v^2 - (a2 - c2) v + (b2 lambda - a2) = 0; pick the root free of cancellation first.
  const double prod = (P.b2 * lambda - P.a2) / P.c2;
  if (m >= 0.0) {
    e.v2 = (m + r) / (2.0 * P.c2);
    e.v1 = e.v2 != 0.0 ? prod / e.v2 : (m - r) / (2.0 * P.c2);
  } else {
    e.v1 = (m - r) / (2.0 * P.c2);
    e.v2 = e.v1 != 0.0 ? prod / e.v1 : (m + r) / (2.0 * P.c2);
  }
  return e;
}

Admissibility admissible(const Params& P) {
  Admissibility a;
  a.ordering = ordering_holds(P);
  if (a.ordering) {
    const ConstantState cs = constant_state(P);
    a.bifurcation_positive = P.a2 > P.c2 && cs.v_bar < (P.a2 - P.c2) / (2.0 * P.c2);
  }
  const double s = P.a2 + P.c2;
  a.lambda_window = {P.a2 / P.b2, s * s / (4.0 * P.b2 * P.c2)};
  return a;
}

}  // namespace shadowkit::model
