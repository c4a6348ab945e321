#include <cmath>
#include <numbers>

#include "routeplace/density.hpp"

namespace routeplace {

NeumannPoisson::NeumannPoisson(int n, int m, double width, double height)
    : n_(n), m_(m), cos_x_(n, n), cos_y_(m, m), inv_eigen_(n, m) {
  const double pi = std::numbers::pi;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < n; ++i) cos_x_(u, i) = std::cos(pi * u * (i + 0.5) / n);
  for (int v = 0; v < m; ++v)
    for (int j = 0; j < m; ++j) cos_y_(v, j) = std::cos(pi * v * (j + 0.5) / m);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < m; ++v) {
      if (u == 0 && v == 0) {
        inv_eigen_(u, v) = 0.0;
        continue;
      }
      double wu = pi * u / width, wv = pi * v / height;
      double norm = (u == 0 ? 1.0 : 2.0) / n * (v == 0 ? 1.0 : 2.0) / m;
      inv_eigen_(u, v) = norm / (wu * wu + wv * wv);
    }
  }
}

std::vector<double> NeumannPoisson::solve(const std::vector<double> &rho) const {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> r(rho.data(), n_, m_);
  Eigen::MatrixXd coeff = cos_x_ * r * cos_y_.transpose();
  coeff.array() *= inv_eigen_.array();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> psi = cos_x_.transpose() * coeff * cos_y_;
  return {psi.data(), psi.data() + psi.size()};
}

}  // namespace routeplace
