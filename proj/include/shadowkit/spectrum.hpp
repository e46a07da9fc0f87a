#pragma once

#include <complex>
#include <vector>

#include "shadowkit/discretize.hpp"

namespace shadowkit::spectrum {

using discretize::Grid;
using discretize::Params;
using discretize::State;

/// Dense copy of the bordered Jacobian at (S.v, S.lambda).
Eigen::MatrixXd linearized_matrix(const State& S, double eps, const Params& P);

/// The `count` eigenvalues of largest real part, ties broken by larger imaginary part.
std::vector<std::complex<double>> leading_spectrum(const Eigen::MatrixXd& m, int count);

/**
 * @brief Linearization of the time-dependent problem with lambda slaved to the constraint.
 *
 * With J = [A c; r^T d], perturbations obey u_t = A u + c mu and r^T u + d mu = 0.
 * For d != 0 this is the Schur complement A - c r^T / d (size n+1). For d = 0 the
 * constraint confines u to r-perp and mu is eliminated by the oblique projection
 * along c, giving an n x n matrix in an orthonormal basis of r-perp.
 */
Eigen::MatrixXd constrained_matrix(const State& S, double eps, const Params& P);

/// Leading eigenvalues of constrained_matrix().
std::vector<std::complex<double>> stability_spectrum(const State& S, double eps, const Params& P,
                                                     int count = 1);

/// Largest real part of the constrained spectrum.
double leading_real_part(const State& S, double eps, const Params& P);

/// True iff the leading real part is <= -margin; Indeterminate within +-margin of zero.
bool is_stable(const State& S, double eps, const Params& P, double margin = 1e-8);

/// Same test for the frozen-lambda operator eps D2 + diag(f_v).
bool is_stable_fixed_lambda(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                            const Params& P, double margin = 1e-8);

}  // namespace shadowkit::spectrum
