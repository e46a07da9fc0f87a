#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "shadowkit/discretize.hpp"

namespace shadowkit::continuation {

using discretize::Grid;
using discretize::Params;
using discretize::State;

struct BranchPoint {
  double s = 0.0;  ///< mode amplitude of the profile
  double eps = 0.0;
  double lambda = 0.0;
  State state;
  double leading_eig = 0.0;  ///< NaN when stability was not computed
  bool stable = false;
  int corrector_iterations = 0;
};

enum class EventKind { Fold, LeftDomain, EpsBelowMin, PositivityExhausted, StepTooSmall, SMaxReached, MaxPoints };

const char* to_string(EventKind kind);

struct BranchEvent {
  EventKind kind = EventKind::Fold;
  std::size_t index = 0;  ///< index of the point at which the event was recorded
  double eps = 0.0;
  std::string detail;
};

struct Branch {
  int k = 0;
  Params params;
  double origin_eps = 0.0;  ///< bifurcation value of the discrete problem
  double origin_lambda = 0.0;
  double origin_v_bar = 0.0;
  std::vector<BranchPoint> points;
  std::vector<BranchEvent> events;
  Eigen::VectorXd end_tangent;  ///< unit tangent at points.back(), in (v, lambda, eps)
  double end_step = 0.0;
};

struct ContinuationOptions {
  int n = 400;
  double step = 0.002;            ///< initial amplitude of the seed and initial arclength step
  double s_max = 0.05;
  double eps_min = 0.0;
  double tol = 1e-10;
  int max_points = 5000;
  int corrector_max_iter = 15;
  int max_halvings = 14;
  double grow = 1.3;
  int easy_iterations = 3;        ///< corrector iterations counted as an easy step
  int easy_steps_to_grow = 3;
  double max_step_factor = 8.0;   ///< cap relative to the initial step
  bool compute_stability = true;
  int stability_every = 1;
  double stability_margin = 1e-8;
  double positivity_floor = 1e-10;
  bool stop_at_fold = true;
};

/// Both half-branches bifurcating from the constant state at mode k, seeded at amplitude +-step.
/// Throws SeedFailure when the first corrector step cannot be completed.
std::pair<Branch, Branch> branch_from_bifurcation(int k, const Params& P, const ContinuationOptions& opt = {});

/// Continues B past its last point (ignoring s_max) until eps <= eps_min or another endpoint event.
Branch extend_to_small_eps(const Branch& B, double eps_min, const ContinuationOptions& opt = {});

/// Concatenates the reversed minus branch and the plus branch (shared origin kept once).
Branch merge(const Branch& plus, const Branch& minus);

struct PitchforkFit {
  double K1_fit = 0.0;
  double K2_fit = 0.0;
  double lambda1_fit = 0.0;
  double lambda2_fit = 0.0;
  std::size_t points_used = 0;
};

/// Least squares eps - eps_k = K1 s + K2 s^2 and lambda - lambda_bar = l1 s + l2 s^2 over 0 < |s| <= s_window.
PitchforkFit fit_pitchfork(const Branch& B, double s_window);

struct Detection {
  int k = 0;
  double eps = 0.0;
  double kernel_mean = 0.0;  ///< mean of the kernel profile relative to its sup
  double projection = 0.0;   ///< normalized overlap with cos(k pi x / L)
};

struct DetectOptions {
  int n = 800;
  int min_sweep_points = 200;
  double rel_tol = 1e-12;
};

/// Sign changes of det J at the constant state across [lo, hi], refined by bisection.
std::vector<Detection> detect_bifurcations(const Params& P, double lo, double hi, int k_max,
                                           const DetectOptions& opt = {});

bool strictly_monotone(const Eigen::VectorXd& v);

/// Fraction of non-origin points whose profile is strictly monotone.
double monotone_fraction(const Branch& B);

/// Columns s,eps,lambda,v_min,v_max,v0,vL,leading_eig,stable.
void write_branch_csv(std::ostream& os, const Branch& B, const std::string& header = "");

/// Columns x,v of one branch point.
void write_profile_csv(std::ostream& os, const BranchPoint& p, const std::string& header = "");

}  // namespace shadowkit::continuation
