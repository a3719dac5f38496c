#include "rpde/spectral.hpp"

#include <cmath>

namespace rpde::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double eigenvalue(int j, double length) {
  if (j < 1) throw std::domain_error("eigenvalue: mode index must be >= 1");
  if (!(length > 0.0)) throw std::domain_error("eigenvalue: length must be > 0");
  const double k = double(j) * kPi / length;
  return k * k;
}

Grid::Grid(double length, int n_modes, int n_quad)
    : length_(length), n_modes_(n_modes), n_quad_(n_quad) {
  if (!(length > 0.0)) throw DimensionError("Grid: length must be > 0");
  if (n_modes < 1) throw DimensionError("Grid: n_modes must be >= 1");
  if (n_quad < 4 * n_modes) {
    throw DimensionError("Grid: n_quad must be >= 4 * n_modes");
  }
  nodes_ = Eigen::VectorXd::LinSpaced(n_quad + 1, 0.0, length);
  eigenvalues_.resize(n_modes);
  synthesis_.resize(n_quad + 1, n_modes);
  derivative_.resize(n_quad + 1, n_modes);
  for (int j = 1; j <= n_modes; ++j) {
    eigenvalues_[j - 1] = eigenvalue(j, length);
    const double k = double(j) * kPi / length;
    for (int i = 0; i <= n_quad; ++i) {
      // Evaluate the phase on the index grid so the endpoint rows are exact.
      const double phase = double(j) * kPi * double(i) / double(n_quad);
      synthesis_(i, j - 1) = std::sin(phase);
      derivative_(i, j - 1) = k * std::cos(phase);
    }
  }
}

Eigen::VectorXd synthesize(const SpectralField& u, const Grid& grid) {
  if (u.coeffs.size() != grid.n_modes()) {
    throw DimensionError("synthesize: coefficient count != n_modes");
  }
  return grid.synthesis() * u.coeffs;
}

SpectralField analyze(const Eigen::VectorXd& values, const Grid& grid) {
  if (values.size() != grid.n_quad() + 1) {
    throw DimensionError("analyze: value count != n_quad + 1");
  }
  // Discrete sine orthogonality on the interior nodes:
  // sum_{i=1}^{n-1} sin(j pi i/n) sin(k pi i/n) = (n/2) delta_jk for j,k < n.
  const int n = grid.n_quad();
  SpectralField out;
  out.coeffs = (2.0 / double(n)) *
               (grid.synthesis().middleRows(1, n - 1).transpose() *
                values.segment(1, n - 1));
  return out;
}

double trapezoid(const Eigen::VectorXd& values, const Grid& grid) {
  if (values.size() != grid.n_quad() + 1) {
    throw DimensionError("trapezoid: value count != n_quad + 1");
  }
  const int n = grid.n_quad();
  double s = 0.5 * (values[0] + values[n]) + values.segment(1, n - 1).sum();
  return s * grid.spacing();
}

double lq_norm(const SpectralField& u, double q, const Grid& grid) {
  if (!(q >= 1.0)) throw std::domain_error("lq_norm: q must be >= 1");
  const Eigen::VectorXd vals = synthesize(u, grid);
  const Eigen::VectorXd integrand =
      vals.array().abs().pow(q).matrix();
  return std::pow(trapezoid(integrand, grid), 1.0 / q);
}

double h1_norm(const SpectralField& u, const Grid& grid) {
  if (u.coeffs.size() != grid.n_modes()) {
    throw DimensionError("h1_norm: coefficient count != n_modes");
  }
  const double s =
      (grid.eigenvalues().array() * u.coeffs.array().square()).sum();
  return std::sqrt(s * grid.length() / 2.0);
}

double h2_norm(const SpectralField& u, const Grid& grid) {
  if (u.coeffs.size() != grid.n_modes()) {
    throw DimensionError("h2_norm: coefficient count != n_modes");
  }
  const double s =
      (grid.eigenvalues().array().square() * u.coeffs.array().square()).sum();
  return std::sqrt(s * grid.length() / 2.0);
}

double linf_norm(const SpectralField& u, const Grid& grid) {
  return synthesize(u, grid).array().abs().maxCoeff();
}

double mixed_integral(const SpectralField& u, double q, const Grid& grid) {
  if (!(q >= 2.0)) throw std::domain_error("mixed_integral: q must be >= 2");
  const Eigen::VectorXd vals = synthesize(u, grid);
  const Eigen::VectorXd grad = grid.derivative() * u.coeffs;
  Eigen::VectorXd integrand;
  if (q == 2.0) {
    integrand = grad.array().square().matrix();
  } else {
    integrand =
        (vals.array().abs().pow(q - 2.0) * grad.array().square()).matrix();
  }
  return trapezoid(integrand, grid);
}

}  // namespace rpde::spectral
