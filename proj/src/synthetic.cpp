#include "routeplace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace routeplace {

SyntheticSpec SyntheticSpec::from_config(const KeyValueConfig &cfg) {
  cfg.reject_unknown({"cell_count", "net_count", "min_pins", "max_pins", "degree_exponent", "fixed_fraction",
                      "global_fraction", "locality", "cell_width_min", "cell_width_max", "cell_height",
                      "utilization", "region_x0", "region_y0", "region_x1", "region_y1", "grid_n", "grid_m",
                      "cap_h", "cap_v", "seed", "connected"});
  SyntheticSpec s;
  s.cell_count = static_cast<int>(cfg.get_int("cell_count", s.cell_count));
  s.net_count = static_cast<int>(cfg.get_int("net_count", s.net_count));
  s.min_pins = static_cast<int>(cfg.get_int("min_pins", s.min_pins));
  s.max_pins = static_cast<int>(cfg.get_int("max_pins", s.max_pins));
  s.degree_exponent = cfg.get_double("degree_exponent", s.degree_exponent);
  s.fixed_fraction = cfg.get_double("fixed_fraction", s.fixed_fraction);
  s.global_fraction = cfg.get_double("global_fraction", s.global_fraction);
  s.locality = static_cast<int>(cfg.get_int("locality", s.locality));
  s.cell_width_min = static_cast<int>(cfg.get_int("cell_width_min", s.cell_width_min));
  s.cell_width_max = static_cast<int>(cfg.get_int("cell_width_max", s.cell_width_max));
  s.cell_height = cfg.get_double("cell_height", s.cell_height);
  s.utilization = cfg.get_double("utilization", s.utilization);
  s.region.x0 = cfg.get_double("region_x0", s.region.x0);
  s.region.y0 = cfg.get_double("region_y0", s.region.y0);
  s.region.x1 = cfg.get_double("region_x1", s.region.x1);
  s.region.y1 = cfg.get_double("region_y1", s.region.y1);
  s.grid.n = static_cast<int>(cfg.get_int("grid_n", s.grid.n));
  s.grid.m = static_cast<int>(cfg.get_int("grid_m", s.grid.m));
  s.grid.cap_h = cfg.get_double("cap_h", s.grid.cap_h);
  s.grid.cap_v = cfg.get_double("cap_v", s.grid.cap_v);
  s.seed = cfg.get_u64("seed", s.seed);
  s.connected = cfg.get_bool("connected", s.connected);
  return s;
}

KeyValueConfig SyntheticSpec::to_config() const {
  KeyValueConfig c;
  c.set("cell_count", std::to_string(cell_count));
  c.set("net_count", std::to_string(net_count));
  c.set("min_pins", std::to_string(min_pins));
  c.set("max_pins", std::to_string(max_pins));
  c.set("degree_exponent", format_double(degree_exponent));
  c.set("fixed_fraction", format_double(fixed_fraction));
  c.set("global_fraction", format_double(global_fraction));
  c.set("locality", std::to_string(locality));
  c.set("cell_width_min", std::to_string(cell_width_min));
  c.set("cell_width_max", std::to_string(cell_width_max));
  c.set("cell_height", format_double(cell_height));
  c.set("utilization", format_double(utilization));
  c.set("region_x0", format_double(region.x0));
  c.set("region_y0", format_double(region.y0));
  c.set("region_x1", format_double(region.x1));
  c.set("region_y1", format_double(region.y1));
  c.set("grid_n", std::to_string(grid.n));
  c.set("grid_m", std::to_string(grid.m));
  c.set("cap_h", format_double(grid.cap_h));
  c.set("cap_v", format_double(grid.cap_v));
  c.set("seed", std::to_string(seed));
  c.set("connected", connected ? "1" : "0");
  return c;
}

namespace {

// Draws from [0, n) using only the raw engine output so results do not depend
// on the standard library's distribution implementations.
std::size_t draw_index(std::mt19937_64 &rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double draw_unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Netlist generate_synthetic(const SyntheticSpec &spec) {
  const int n_cells = spec.cell_count;
  if (n_cells < 1 || spec.net_count < 1) throw InfeasibleSpecError("cell_count and net_count must be >= 1");
  if (spec.min_pins < 2 || spec.max_pins < spec.min_pins) {
    throw InfeasibleSpecError("pins per net must satisfy 2 <= min_pins <= max_pins");
  }
  if (spec.max_pins > n_cells) throw InfeasibleSpecError("max_pins exceeds cell_count");
  if (spec.cell_width_min < 1 || spec.cell_width_max < spec.cell_width_min || !(spec.cell_height > 0)) {
    throw InfeasibleSpecError("bad cell size range");
  }
  if (spec.fixed_fraction < 0 || spec.fixed_fraction >= 1) throw InfeasibleSpecError("fixed_fraction must be in [0, 1)");

  std::mt19937_64 rng(spec.seed);
  Netlist nl;
  nl.grid = spec.grid;

  // Hidden lattice in boustrophedon order: consecutive ids are lattice neighbours.
  const int sx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_cells))));
  const int sy = (n_cells + sx - 1) / sx;
  std::vector<int> lat_col(n_cells), lat_row(n_cells);
  std::vector<int> at_lattice(static_cast<std::size_t>(sx) * sy, -1);
  for (int c = 0; c < n_cells; ++c) {
    int r = c / sx, k = c % sx;
    lat_row[c] = r;
    lat_col[c] = (r % 2 == 0) ? k : sx - 1 - k;
    at_lattice[static_cast<std::size_t>(r) * sx + lat_col[c]] = c;
  }

  nl.cells.resize(n_cells);
  double total_area = 0.0;
  for (int c = 0; c < n_cells; ++c) {
    int span = spec.cell_width_max - spec.cell_width_min + 1;
    nl.cells[c].width = spec.cell_width_min + static_cast<int>(draw_index(rng, span));
    nl.cells[c].height = spec.cell_height;
    total_area += nl.cells[c].width * nl.cells[c].height;
  }

  if (spec.region.x1 > spec.region.x0 && spec.region.y1 > spec.region.y0) {
    nl.region = spec.region;
  } else {
    if (!(spec.utilization > 0 && spec.utilization < 1)) throw InfeasibleSpecError("utilization must be in (0, 1)");
    double side = std::ceil(std::sqrt(total_area / spec.utilization));
    nl.region = {0.0, 0.0, side, side};
  }

  // Fixed cells are pads on the lattice perimeter, placed on the region boundary.
  int n_fixed = static_cast<int>(std::lround(spec.fixed_fraction * n_cells));
  std::vector<int> perimeter, interior;
  for (int c = 0; c < n_cells; ++c) {
    bool edge = lat_col[c] == 0 || lat_col[c] == sx - 1 || lat_row[c] == 0 || lat_row[c] == sy - 1;
    (edge ? perimeter : interior).push_back(c);
  }
  std::vector<int> fixed_pool = perimeter;
  for (std::size_t i = fixed_pool.size(); i > 1; --i) std::swap(fixed_pool[i - 1], fixed_pool[draw_index(rng, i)]);
  for (std::size_t i = interior.size(); i > 1; --i) std::swap(interior[i - 1], interior[draw_index(rng, i)]);
  fixed_pool.insert(fixed_pool.end(), interior.begin(), interior.end());
  const LayoutRegion &R = nl.region;
  for (int k = 0; k < n_fixed; ++k) {
    Cell &cell = nl.cells[fixed_pool[k]];
    int c = fixed_pool[k];
    cell.fixed = true;
    cell.has_position = true;
    cell.width = 1.0;
    cell.height = std::min(1.0, spec.cell_height);
    double fx = R.x0 + (lat_col[c] + 0.5) / sx * R.width() - cell.width / 2;
    double fy = R.y0 + (lat_row[c] + 0.5) / sy * R.height() - cell.height / 2;
    if (lat_col[c] == 0) fx = R.x0;
    if (lat_col[c] == sx - 1) fx = R.x1 - cell.width;
    if (lat_row[c] == 0) fy = R.y0;
    if (lat_row[c] == sy - 1) fy = R.y1 - cell.height;
    cell.x = std::clamp(fx, R.x0, R.x1 - cell.width);
    cell.y = std::clamp(fy, R.y0, R.y1 - cell.height);
  }

  // Net degrees from the truncated power law.
  std::vector<double> cdf;
  double acc = 0.0;
  for (int k = spec.min_pins; k <= spec.max_pins; ++k) {
    acc += std::pow(static_cast<double>(k), -spec.degree_exponent);
    cdf.push_back(acc);
  }
  std::vector<int> degree(spec.net_count);
  for (int e = 0; e < spec.net_count; ++e) {
    double u = draw_unit(rng) * acc;
    int k = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    degree[e] = spec.min_pins + std::min(k, static_cast<int>(cdf.size()) - 1);
  }
  if (spec.connected && n_cells > 1) {
    long long links = 0;
    for (int d : degree) links += d - 1;
    for (int e = 0; links < n_cells - 1; e = (e + 1) % spec.net_count) {
      if (degree[e] < spec.max_pins) {
        ++degree[e];
        ++links;
      } else if (std::all_of(degree.begin(), degree.end(), [&](int d) { return d == spec.max_pins; })) {
        throw InfeasibleSpecError("too few pins to connect every cell");
      }
    }
  }

  std::vector<std::vector<int>> members(spec.net_count);
  int e = 0;
  if (spec.connected && n_cells > 1) {
    // Chain nets sweep the lattice order so the hypergraph is connected.
    int next = 1;
    for (; e < spec.net_count && next < n_cells; ++e) {
      members[e].push_back(next - 1);
      while (static_cast<int>(members[e].size()) < degree[e] && next < n_cells) members[e].push_back(next++);
      while (static_cast<int>(members[e].size()) < degree[e]) {
        int c = static_cast<int>(draw_index(rng, n_cells));
        if (std::find(members[e].begin(), members[e].end(), c) == members[e].end()) members[e].push_back(c);
      }
    }
  }
  for (; e < spec.net_count; ++e) {
    int anchor = static_cast<int>(draw_index(rng, n_cells));
    members[e].push_back(anchor);
    int radius = std::max(1, spec.locality);
    int attempts = 0;
    while (static_cast<int>(members[e].size()) < degree[e]) {
      int c;
      if (draw_unit(rng) < spec.global_fraction) {
        c = static_cast<int>(draw_index(rng, n_cells));
      } else {
        int dc = static_cast<int>(draw_index(rng, 2 * radius + 1)) - radius;
        int dr = static_cast<int>(draw_index(rng, 2 * radius + 1)) - radius;
        int col = lat_col[anchor] + dc, row = lat_row[anchor] + dr;
        if (col < 0 || col >= sx || row < 0 || row >= sy) continue;
        c = at_lattice[static_cast<std::size_t>(row) * sx + col];
        if (c < 0) continue;
      }
      if (std::find(members[e].begin(), members[e].end(), c) == members[e].end()) {
        members[e].push_back(c);
      } else if (++attempts > 8 * (2 * radius + 1) * (2 * radius + 1)) {
        ++radius;
        attempts = 0;
      }
    }
  }
  for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[draw_index(rng, i)]);

  nl.nets.resize(spec.net_count);
  for (int net = 0; net < spec.net_count; ++net) {
    for (std::size_t k = 0; k < members[net].size(); ++k) {
      const Cell &cell = nl.cells[members[net][k]];
      Pin p;
      p.cell = members[net][k];
      p.net = net;
      p.direction = k == 0 ? PinDirection::Output : PinDirection::Input;
      // Offsets on a 1/8 unit raster inside the cell.
      p.dx = std::floor(draw_unit(rng) * cell.width * 8.0) / 8.0;
      p.dy = std::floor(draw_unit(rng) * cell.height * 8.0) / 8.0;
      nl.nets[net].pins.push_back(nl.num_pins());
      nl.pins.push_back(p);
    }
  }
  nl.validate();
  return nl;
}

}  // namespace routeplace
