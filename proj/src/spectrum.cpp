#include "shadowkit/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "shadowkit/error.hpp"

namespace shadowkit::spectrum {

Eigen::MatrixXd linearized_matrix(const State& S, double eps, const Params& P) {
  return Eigen::MatrixXd(discretize::jacobian(S, eps, P));
}

std::vector<std::complex<double>> leading_spectrum(const Eigen::MatrixXd& m, int count) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  if (count < 0 || count > m.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "requested more eigenvalues than the matrix has");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "eigenvalue iteration failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  ev.resize(count);
  return ev;
}

Eigen::MatrixXd constrained_matrix(const State& S, double eps, const Params& P) {
  const Eigen::MatrixXd J = linearized_matrix(S, eps, P);
  const Eigen::Index m = S.grid.size();
  const Eigen::MatrixXd A = J.topLeftCorner(m, m);
  const Eigen::VectorXd c = J.col(m).head(m);
  const Eigen::VectorXd r = J.row(m).head(m).transpose();
  const double d = J(m, m);
  const double rc = r.dot(c);
  const double scale = r.cwiseAbs().dot(c.cwiseAbs());

  if (std::abs(d) > 1e-13 * scale && d != 0.0) return A - c * (r.transpose() / d);

  if (!(std::abs(rc) > 1e-13 * scale) || scale == 0.0) {
    throw Error(ErrorKind::Indeterminate, "constraint row does not determine the lambda perturbation");
  }
  // Oblique projection onto r-perp along c, then an orthonormal basis of r-perp
  // from the Householder reflector that maps e_0 to a multiple of r.
  Eigen::MatrixXd M = A - c * ((r.transpose() * A) / rc);
  Eigen::VectorXd u = r / r.norm();
  u(0) += (u(0) >= 0.0 ? 1.0 : -1.0);
  const double uu = u.squaredNorm();
  M -= (2.0 / uu) * u * (u.transpose() * M);
  M -= (2.0 / uu) * (M * u) * u.transpose();
  return M.bottomRightCorner(m - 1, m - 1);
}

std::vector<std::complex<double>> stability_spectrum(const State& S, double eps, const Params& P,
                                                     int count) {
  const Eigen::MatrixXd M = constrained_matrix(S, eps, P);
  return leading_spectrum(M, std::min<int>(count, static_cast<int>(M.rows())));
}

double leading_real_part(const State& S, double eps, const Params& P) {
  return stability_spectrum(S, eps, P, 1).front().real();
}

namespace {

bool decide(double lead, double margin) {
  if (std::abs(lead) < margin) {
    std::ostringstream os;
    os << "leading real part " << lead << " within margin " << margin << " of zero";
    throw Error(ErrorKind::Indeterminate, os.str());
  }
  return lead <= -margin;
}

}  // namespace

bool is_stable(const State& S, double eps, const Params& P, double margin) {
  return decide(leading_real_part(S, eps, P), margin);
}

bool is_stable_fixed_lambda(const Grid& grid, const Eigen::VectorXd& v, double lambda, double eps,
                            const Params& P, double margin) {
  const Eigen::MatrixXd A(discretize::pde_jacobian(grid, v, lambda, eps, P));
  return decide(leading_spectrum(A, 1).front().real(), margin);
}

}  // namespace shadowkit::spectrum
