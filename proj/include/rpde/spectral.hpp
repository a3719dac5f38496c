#ifndef RPDE_SPECTRAL_HPP_
#define RPDE_SPECTRAL_HPP_

#include <Eigen/Dense>

#include "rpde/errors.hpp"

namespace rpde::spectral {

// Dirichlet eigenvalue (j pi / L)^2 of -d^2/dx^2 on (0, L), j >= 1.
double eigenvalue(int j, double length);

// Sine-basis discretization of (0, L): w_j(x) = sin(j pi x / L).
// Quadrature nodes x_i = i L / n_quad, i = 0..n_quad (endpoints included;
// every basis function vanishes there). Discrete sine orthogonality makes
// analyze . synthesize the identity for fields with < n_quad modes.
class Grid {
 public:
  Grid(double length, int n_modes, int n_quad);

  double length() const { return length_; }
  int n_modes() const { return n_modes_; }
  int n_quad() const { return n_quad_; }
  double spacing() const { return length_ / n_quad_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  // (n_quad + 1) x n_modes synthesis matrix S_ij = sin(j pi x_i / L).
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  // Derivative synthesis D_ij = (j pi / L) cos(j pi x_i / L).
  const Eigen::MatrixXd& derivative() const { return derivative_; }

 private:
  double length_;
  int n_modes_;
  int n_quad_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd derivative_;
};

// u(x) = sum_j coeffs[j-1] * sin(j pi x / L).
struct SpectralField {
  Eigen::VectorXd coeffs;

  static SpectralField zero(int n_modes) {
    return {Eigen::VectorXd::Zero(n_modes)};
  }
};

// Values of u at the quadrature nodes (length n_quad + 1).
Eigen::VectorXd synthesize(const SpectralField& u, const Grid& grid);

// Projection of nodal values onto the first n_modes sine modes.
SpectralField analyze(const Eigen::VectorXd& values, const Grid& grid);

// Composite trapezoid of a nodal integrand over (0, L).
double trapezoid(const Eigen::VectorXd& values, const Grid& grid);

// (int_0^L |u|^q dx)^{1/q}, q >= 1, by trapezoid quadrature.
double lq_norm(const SpectralField& u, double q, const Grid& grid);

// |grad u| and |Laplacian u|, exact in the coefficients.
double h1_norm(const SpectralField& u, const Grid& grid);
double h2_norm(const SpectralField& u, const Grid& grid);

// Grid maximum of |u| (a lower bound on the true sup).
double linf_norm(const SpectralField& u, const Grid& grid);

// int_0^L |u|^{q-2} |grad u|^2 dx, q >= 2, by trapezoid quadrature.
double mixed_integral(const SpectralField& u, double q, const Grid& grid);

}  // namespace rpde::spectral

#endif  // RPDE_SPECTRAL_HPP_
