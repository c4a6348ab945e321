#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "routeplace/netlist.hpp"
#include "routeplace/router.hpp"
#include "routeplace/wirelength.hpp"

namespace routeplace {

/// Spectral solver for laplacian(psi) = -rho on an n x m bin grid with
/// zero-Neumann boundary and zero-mean solution, using a cosine basis.
class NeumannPoisson {
 public:
  NeumannPoisson(int n, int m, double width, double height);

  /// rho and the result are flat i * m + j. The mean of rho is ignored.
  std::vector<double> solve(const std::vector<double> &rho) const;

  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int n_, m_;
  Eigen::MatrixXd cos_x_;  // (u, i) -> cos(pi u (i + 1/2) / n)
  Eigen::MatrixXd cos_y_;
  Eigen::MatrixXd inv_eigen_;  // normalisation / eigenvalue, 0 at (0, 0)
};

class DensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Electrostatic density penalty.
///
/// Each cell is spread over at least sqrt(2) bin pitches per axis (charge
/// preserved) and rasterised exactly. rho is the per-bin density minus its
/// mean, psi solves the Poisson system, and D = sum_i sum_b overlap_ib psi_b.
/// D is a symmetric quadratic form in the overlaps, so its exact gradient is
/// 2 sum_b psi_b d(overlap_ib)/dx_i.
class DensityModel {
 public:
  DensityModel(const LayoutRegion &region, int n, int m);

  /// Optional size overrides are used by the inflation loop. Fixed cells
  /// contribute charge but get zero gradient.
  ObjectiveTerm evaluate(const Netlist &netlist, const Placement &p, const std::vector<double> *widths = nullptr,
                         const std::vector<double> *heights = nullptr, GridMap *psi_out = nullptr) const;

  const GridGeometry &geometry() const { return geo_; }

 private:
  GridGeometry geo_;
  NeumannPoisson solver_;
};

ObjectiveTerm density(const Netlist &netlist, const Placement &p, int n, int m);

}  // namespace routeplace
