#pragma once

#include <vector>

#include "routeplace/netlist.hpp"

namespace routeplace {

struct ObjectiveTerm {
  double value = 0.0;
  std::vector<double> grad_x;  // per cell, zero for fixed cells
  std::vector<double> grad_y;
};

/// Weighted-average wirelength with smoothing gamma, summed over nets and both
/// axes. Exponentials are shifted by the per-net extreme for stability.
ObjectiveTerm wirelength(const Netlist &netlist, const Placement &p, double gamma);

/// Weighted-average span of one net along one axis, without gradient.
double weighted_average_span(const std::vector<double> &coords, double gamma);

}  // namespace routeplace
