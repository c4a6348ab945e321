#pragma once

#include <cstdint>
#include <stdexcept>

#include "routeplace/config.hpp"
#include "routeplace/netlist.hpp"

namespace routeplace {

/// Parameters of a seeded synthetic netlist family.
///
/// Cells are laid on a hidden lattice; nets prefer lattice-local members so a
/// good placement exists, and a small fraction of members are drawn globally
/// to create long nets through the middle of the layout. Net degrees follow a
/// power law k^-degree_exponent truncated to [min_pins, max_pins].
struct SyntheticSpec {
  int cell_count = 500;
  int net_count = 450;
  int min_pins = 2;
  int max_pins = 6;
  double degree_exponent = 2.5;
  double fixed_fraction = 0.05;
  double global_fraction = 0.03;
  int locality = 2;           // lattice window radius for local net members
  int cell_width_min = 1;
  int cell_width_max = 3;
  double cell_height = 1.0;
  double utilization = 0.5;   // used only when `region` is degenerate
  LayoutRegion region{0, 0, 0, 0};
  RoutingGrid grid{16, 16, 10, 10};
  std::uint64_t seed = 1;
  bool connected = true;

  static SyntheticSpec from_config(const KeyValueConfig &cfg);
  KeyValueConfig to_config() const;
};

class InfeasibleSpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Netlist generate_synthetic(const SyntheticSpec &spec);

}  // namespace routeplace
