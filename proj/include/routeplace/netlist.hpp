#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace routeplace {

enum class PinDirection : std::uint8_t { Input, Output };

struct Pin {
  int cell = 0;
  int net = 0;
  PinDirection direction = PinDirection::Input;
  double dx = 0.0;  // offset from the cell's lower-left corner
  double dy = 0.0;

  bool operator==(const Pin &) const = default;
};

struct Cell {
  double width = 1.0;
  double height = 1.0;
  bool fixed = false;
  // Lower-left corner. Mandatory for fixed cells, an optional hint otherwise.
  bool has_position = false;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Cell &) const = default;
};

struct Net {
  std::vector<int> pins;

  bool operator==(const Net &) const = default;
};

struct LayoutRegion {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }

  bool operator==(const LayoutRegion &) const = default;
};

struct RoutingGrid {
  int n = 1;  // columns (x direction)
  int m = 1;  // rows (y direction)
  double cap_h = 1.0;
  double cap_v = 1.0;

  int size() const { return n * m; }
  // Flat index of grid (i, j); i is the column, j the row.
  int index(int i, int j) const { return i * m + j; }

  bool operator==(const RoutingGrid &) const = default;
};

/// Grid-cell geometry of a routing grid laid over the layout region.
struct GridGeometry {
  LayoutRegion region;
  int n = 1, m = 1;

  GridGeometry() = default;
  GridGeometry(const LayoutRegion &r, int n_, int m_) : region(r), n(n_), m(m_) {}

  double pitch_x() const { return region.width() / n; }
  double pitch_y() const { return region.height() / m; }
  double bin_area() const { return pitch_x() * pitch_y(); }
  double center_x(int i) const { return region.x0 + (i + 0.5) * pitch_x(); }
  double center_y(int j) const { return region.y0 + (j + 0.5) * pitch_y(); }
  double lo_x(int i) const { return region.x0 + i * pitch_x(); }
  double lo_y(int j) const { return region.y0 + j * pitch_y(); }
  double hi_x(int i) const { return i + 1 == n ? region.x1 : lo_x(i + 1); }
  double hi_y(int j) const { return j + 1 == m ? region.y1 : lo_y(j + 1); }
  // Column containing x, clamped into [0, n).
  int column(double x) const;
  int row(double y) const;
};

struct Netlist {
  std::vector<Cell> cells;
  std::vector<Net> nets;
  std::vector<Pin> pins;
  LayoutRegion region;
  RoutingGrid grid;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_nets() const { return static_cast<int>(nets.size()); }
  int num_pins() const { return static_cast<int>(pins.size()); }
  int num_movable() const;
  GridGeometry geometry() const { return {region, grid.n, grid.m}; }

  /// Pin ids owned by each cell, in pin-id order.
  std::vector<std::vector<int>> cell_pins() const;

  /// Throws NetlistError(kind = Invariant) on the first violated invariant.
  void validate() const;

  bool operator==(const Netlist &) const = default;
};

/// Cell lower-left coordinates, indexed by cell id.
struct Placement {
  std::vector<double> x;
  std::vector<double> y;

  Placement() = default;
  explicit Placement(std::size_t n) : x(n, 0.0), y(n, 0.0) {}

  std::size_t size() const { return x.size(); }
  bool operator==(const Placement &) const = default;
};

class NetlistError : public std::runtime_error {
 public:
  enum class Kind { Malformed, DanglingReference, Invariant, LengthMismatch };

  NetlistError(Kind kind, int line, const std::string &what);

  Kind kind() const { return kind_; }
  int line() const { return line_; }  // 0 when not tied to a line

 private:
  Kind kind_;
  int line_;
};

Netlist parse_netlist(std::string_view text);
std::string serialize_netlist(const Netlist &netlist);

std::string write_placement(const Placement &p);
/// Parses a placement file; expected_cells < 0 skips the length check.
Placement read_placement(std::string_view text, int expected_cells = -1);

/// Placement with fixed cells at their netlist positions and movable cells at
/// their hint (or the region's lower-left corner when absent).
Placement initial_placement(const Netlist &netlist);

double pin_x(const Netlist &netlist, const Placement &p, int pin);
double pin_y(const Netlist &netlist, const Placement &p, int pin);

/// Half-perimeter wirelength over all nets, in layout units.
double hpwl(const Netlist &netlist, const Placement &p);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace routeplace
