#pragma once

#include "shadowkit/analytic.hpp"
#include "shadowkit/discretize.hpp"

namespace shadowkit::layer {

using discretize::Grid;
using discretize::Params;
using discretize::State;

/**
 * @brief Increasing orbit of V'' + f(V, lambda) = 0 from 0 to v2(lambda), V(0) = v2/2.
 *
 * Built from the first integral: for V < v2/2 on the energy level of the saddle at 0,
 * for V > v2/2 on the level of the saddle at v2. The two levels agree only when the
 * equal-area gap vanishes; otherwise the profile has a kink at z = 0.
 */
struct Heteroclinic {
  double lambda = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double gap = 0.0;  ///< int_0^{v2} f dv
  double Z = 0.0;
  double stretch = 0.0;  ///< z = stretch * atanh(xi), xi uniform
  Eigen::VectorXd z;
  Eigen::VectorXd V0;
  Eigen::VectorXd dV0;
  /// V0 for z < 0 and v2 - V0 for z >= 0, kept separately so tails do not round to v2.
  Eigen::VectorXd deviation;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;

  /// Hermite interpolation in z with exponential extrapolation beyond +-Z.
  double value(double z) const;
};

struct HeteroclinicOptions {
  double gap_tol = 1e-10;
  int nodes = 4001;        ///< odd, so z = 0 is a node
  double Z = 0.0;          ///< 0 selects 40 / min(kappa_minus, kappa_plus)
  double max_substep = 0.01;
};

/// Throws Unbalanced when |maxwell_gap| > gap_tol and NegativeEnergy when an energy radicand turns negative.
Heteroclinic heteroclinic(double lambda, const Params& P, const HeteroclinicOptions& opt = {});

/// Largest deviation of (V')^2/2 + int_0^V f from its level, with V' from 5-point differences of V0.
double first_integral_drift(const Heteroclinic& H, const Params& P);

/// Least-squares slope of log(deviation) against |z| over the given |z| range (one side).
double tail_log_slope(const Heteroclinic& H, bool right, double z_from, double z_to);

struct LayerAnsatz {
  double x0 = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  double v2 = 0.0;
  double Lstar = 0.0;
  Grid grid;
  Eigen::VectorXd V_eps;
  Eigen::VectorXd chi0;
  Eigen::VectorXd chi1;
};

/// Smooth plateau: 1 on |y| <= Lstar/4, 0 on |y| >= Lstar/2.
double plateau_cutoff(double y, double Lstar);

LayerAnsatz compose_ansatz(const Heteroclinic& H, double x0, double eps, const Grid& grid);

struct ResidualG {
  double sup_G = 0.0;
  Eigen::VectorXd profile;
};

/// eps^{-1/2} (eps D2 V + f(V, lambda)) on the ansatz grid.
ResidualG residual_G(const LayerAnsatz& ansatz, double lambda, const Params& P);

/// Trapezoid of g(v, lambda) over the grid.
double constraint_I(double eps, double lambda, const Eigen::VectorXd& v, const Grid& grid, const Params& P);

struct LayerOptions {
  int n = 0;                     ///< 0 selects max(400, 12 nodes per sqrt(eps) over [0, L])
  int min_nodes_per_sqrt_eps = 12;
  double eps_max = 1e-3;
  double tol = 1e-10;
  int max_iter = 60;
  HeteroclinicOptions het{};
};

struct LayerReport {
  State state;
  double eps = 0.0;
  double x0 = 0.0;
  int n = 0;
  double lambda_eps = 0.0;
  double layer_x = 0.0;
  double v0 = 0.0;
  double vL = 0.0;
  double v2_at_lambda_eps = 0.0;
  double sup_dev = 0.0;        ///< against the ansatz recomposed at (lambda_eps, layer_x)
  double sup_dev_seed = 0.0;   ///< against the seed ansatz at (lambda0_bar, x0)
  double maxwell_gap_at_lambda0 = 0.0;
  double maxwell_gap_at_lambda_eps = 0.0;
  double constraint_residual = 0.0;
  int newton_iterations = 0;
  analytic::LayerTargets targets;
};

int default_layer_cells(double eps, const Params& P, const LayerOptions& opt = {});

/// First crossing of `level` by linear interpolation; NaN when there is none.
double crossing(const Grid& grid, const Eigen::VectorXd& v, double level);

/// Seeds the augmented Newton with the ansatz at lambda0_bar and position x0, then reports.
/// Throws SeedRejected when Newton fails from the seed.
LayerReport layer_solve(double x0, double eps, const Params& P, const LayerOptions& opt = {});

/// Mirror image about x = L appended to the profile: a state on [0, 2L] with 2n cells.
State reflect_extend(const State& S);

}  // namespace shadowkit::layer
