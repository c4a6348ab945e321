#include "routeplace/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace routeplace {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, int line, const char *what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw NetlistError(NetlistError::Kind::Malformed, line,
                       "bad " + std::string(what) + " '" + std::string(tok) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw NetlistError(NetlistError::Kind::Malformed, line, "non-finite " + std::string(what));
    }
  }
  return value;
}

// Iterates over the lines of `text` with comments stripped.
template <typename F>
void for_each_line(std::string_view text, F &&f) {
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_tokens(line);
    if (!toks.empty()) f(lineno, toks);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

NetlistError::NetlistError(Kind kind, int line, const std::string &what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

int GridGeometry::column(double x) const {
  int i = static_cast<int>(std::floor((x - region.x0) / pitch_x()));
  return std::clamp(i, 0, n - 1);
}

int GridGeometry::row(double y) const {
  int j = static_cast<int>(std::floor((y - region.y0) / pitch_y()));
  return std::clamp(j, 0, m - 1);
}

int Netlist::num_movable() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const Cell &c) { return !c.fixed; }));
}

std::vector<std::vector<int>> Netlist::cell_pins() const {
  std::vector<std::vector<int>> out(cells.size());
  for (int p = 0; p < num_pins(); ++p) out[pins[p].cell].push_back(p);
  return out;
}

void Netlist::validate() const {
  using K = NetlistError::Kind;
  if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) {
    throw NetlistError(K::Invariant, 0, "region must satisfy x1 > x0 and y1 > y0");
  }
  if (grid.n < 1 || grid.m < 1 || !(grid.cap_h > 0) || !(grid.cap_v > 0)) {
    throw NetlistError(K::Invariant, 0, "grid needs n, m >= 1 and positive capacities");
  }
  for (int c = 0; c < num_cells(); ++c) {
    const Cell &cell = cells[c];
    if (!(cell.width > 0) || !(cell.height > 0)) {
      throw NetlistError(K::Invariant, 0, "cell " + std::to_string(c) + " has non-positive size");
    }
    if (cell.fixed) {
      if (!cell.has_position) {
        throw NetlistError(K::Invariant, 0, "fixed cell " + std::to_string(c) + " has no position");
      }
      if (cell.x < region.x0 || cell.y < region.y0 || cell.x + cell.width > region.x1 ||
          cell.y + cell.height > region.y1) {
        throw NetlistError(K::Invariant, 0, "fixed cell " + std::to_string(c) + " lies outside the region");
      }
    }
  }
  for (int p = 0; p < num_pins(); ++p) {
    const Pin &pin = pins[p];
    if (pin.cell < 0 || pin.cell >= num_cells() || pin.net < 0 || pin.net >= num_nets()) {
      throw NetlistError(K::DanglingReference, 0, "pin " + std::to_string(p) + " references a missing cell or net");
    }
  }
  std::vector<int> owner(pins.size(), -1);
  for (int e = 0; e < num_nets(); ++e) {
    const Net &net = nets[e];
    if (net.pins.size() < 2) {
      throw NetlistError(K::Invariant, 0, "net " + std::to_string(e) + " has fewer than 2 pins");
    }
    for (int p : net.pins) {
      if (p < 0 || p >= num_pins()) {
        throw NetlistError(K::DanglingReference, 0, "net " + std::to_string(e) + " lists a missing pin");
      }
      if (owner[p] != -1) {
        throw NetlistError(K::Invariant, 0, "pin " + std::to_string(p) + " listed twice");
      }
      owner[p] = e;
      if (pins[p].net != e) {
        throw NetlistError(K::Invariant, 0, "pin " + std::to_string(p) + " disagrees with its net");
      }
    }
  }
  for (int p = 0; p < num_pins(); ++p) {
    if (owner[p] == -1) throw NetlistError(K::Invariant, 0, "pin " + std::to_string(p) + " belongs to no net");
  }
}

Netlist parse_netlist(std::string_view text) {
  using K = NetlistError::Kind;
  Netlist nl;
  bool have_region = false, have_grid = false;
  int current_net = -1;
  std::vector<int> pin_lines;

  for_each_line(text, [&](int ln, const std::vector<std::string_view> &t) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (t.size() < lo || t.size() > hi) {
        throw NetlistError(K::Malformed, ln, "wrong field count for '" + std::string(t[0]) + "'");
      }
    };
    if (t[0] == "region") {
      need(5, 5);
      nl.region = {parse_number<double>(t[1], ln, "x0"), parse_number<double>(t[2], ln, "y0"),
                   parse_number<double>(t[3], ln, "x1"), parse_number<double>(t[4], ln, "y1")};
      have_region = true;
    } else if (t[0] == "grid") {
      need(5, 5);
      nl.grid = {parse_number<int>(t[1], ln, "n"), parse_number<int>(t[2], ln, "m"),
                 parse_number<double>(t[3], ln, "cap_h"), parse_number<double>(t[4], ln, "cap_v")};
      have_grid = true;
    } else if (t[0] == "cell") {
      if (t.size() != 5 && t.size() != 7) {
        throw NetlistError(K::Malformed, ln, "wrong field count for 'cell'");
      }
      int id = parse_number<int>(t[1], ln, "cell id");
      if (id != nl.num_cells()) {
        throw NetlistError(K::Malformed, ln, "cell ids must be dense and in order (expected " +
                                                 std::to_string(nl.num_cells()) + ")");
      }
      Cell c;
      c.width = parse_number<double>(t[2], ln, "width");
      c.height = parse_number<double>(t[3], ln, "height");
      if (t[4] != "0" && t[4] != "1") throw NetlistError(K::Malformed, ln, "fixed flag must be 0 or 1");
      c.fixed = t[4] == "1";
      if (t.size() == 7) {
        c.has_position = true;
        c.x = parse_number<double>(t[5], ln, "x");
        c.y = parse_number<double>(t[6], ln, "y");
      }
      if (!(c.width > 0) || !(c.height > 0)) throw NetlistError(K::Invariant, ln, "cell size must be positive");
      if (c.fixed && !c.has_position) throw NetlistError(K::Invariant, ln, "fixed cell needs a position");
      nl.cells.push_back(c);
    } else if (t[0] == "net") {
      need(2, 2);
      int id = parse_number<int>(t[1], ln, "net id");
      if (id != nl.num_nets()) {
        throw NetlistError(K::Malformed, ln, "net ids must be dense and in order (expected " +
                                                 std::to_string(nl.num_nets()) + ")");
      }
      nl.nets.emplace_back();
      current_net = id;
    } else if (t[0] == "pin") {
      need(6, 6);
      Pin p;
      p.cell = parse_number<int>(t[1], ln, "cell id");
      p.net = parse_number<int>(t[2], ln, "net id");
      if (t[3] == "I") {
        p.direction = PinDirection::Input;
      } else if (t[3] == "O") {
        p.direction = PinDirection::Output;
      } else {
        throw NetlistError(K::Malformed, ln, "pin direction must be I or O");
      }
      p.dx = parse_number<double>(t[4], ln, "dx");
      p.dy = parse_number<double>(t[5], ln, "dy");
      if (p.cell < 0 || p.net < 0) throw NetlistError(K::DanglingReference, ln, "negative reference");
      if (current_net < 0) throw NetlistError(K::Malformed, ln, "pin before any net line");
      if (p.net != current_net) {
        if (p.net >= nl.num_nets()) throw NetlistError(K::DanglingReference, ln, "pin references an undeclared net");
        throw NetlistError(K::Malformed, ln, "pin net id does not match the enclosing net");
      }
      nl.nets[current_net].pins.push_back(nl.num_pins());
      nl.pins.push_back(p);
      pin_lines.push_back(ln);
    } else {
      throw NetlistError(K::Malformed, ln, "unknown record '" + std::string(t[0]) + "'");
    }
  });

  if (!have_region) throw NetlistError(K::Malformed, 0, "missing region line");
  if (!have_grid) throw NetlistError(K::Malformed, 0, "missing grid line");
  for (int p = 0; p < nl.num_pins(); ++p) {
    if (nl.pins[p].cell >= nl.num_cells()) {
      throw NetlistError(K::DanglingReference, pin_lines[p], "pin references missing cell " +
                                                                  std::to_string(nl.pins[p].cell));
    }
  }
  nl.validate();
  return nl;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string serialize_netlist(const Netlist &nl) {
  std::string out;
  out += "region " + format_double(nl.region.x0) + " " + format_double(nl.region.y0) + " " +
         format_double(nl.region.x1) + " " + format_double(nl.region.y1) + "\n";
  out += "grid " + std::to_string(nl.grid.n) + " " + std::to_string(nl.grid.m) + " " +
         format_double(nl.grid.cap_h) + " " + format_double(nl.grid.cap_v) + "\n";
  for (int c = 0; c < nl.num_cells(); ++c) {
    const Cell &cell = nl.cells[c];
    out += "cell " + std::to_string(c) + " " + format_double(cell.width) + " " + format_double(cell.height) +
           (cell.fixed ? " 1" : " 0");
    if (cell.has_position) out += " " + format_double(cell.x) + " " + format_double(cell.y);
    out += "\n";
  }
  for (int e = 0; e < nl.num_nets(); ++e) {
    out += "net " + std::to_string(e) + "\n";
    for (int p : nl.nets[e].pins) {
      const Pin &pin = nl.pins[p];
      out += "pin " + std::to_string(pin.cell) + " " + std::to_string(pin.net) +
             (pin.direction == PinDirection::Input ? " I " : " O ") + format_double(pin.dx) + " " +
             format_double(pin.dy) + "\n";
    }
  }
  return out;
}

std::string write_placement(const Placement &p) {
  if (p.x.size() != p.y.size()) {
    throw NetlistError(NetlistError::Kind::LengthMismatch, 0, "placement x/y length mismatch");
  }
  std::string out;
  out.reserve(p.size() * 24);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += format_double(p.x[i]);
    out += ' ';
    out += format_double(p.y[i]);
    out += '\n';
  }
  return out;
}

Placement read_placement(std::string_view text, int expected_cells) {
  Placement p;
  for_each_line(text, [&](int ln, const std::vector<std::string_view> &t) {
    if (t.size() != 2) throw NetlistError(NetlistError::Kind::Malformed, ln, "expected 'x y'");
    p.x.push_back(parse_number<double>(t[0], ln, "x"));
    p.y.push_back(parse_number<double>(t[1], ln, "y"));
  });
  if (expected_cells >= 0 && static_cast<int>(p.size()) != expected_cells) {
    throw NetlistError(NetlistError::Kind::LengthMismatch, 0,
                       "placement has " + std::to_string(p.size()) + " entries, expected " +
                           std::to_string(expected_cells));
  }
  return p;
}

Placement initial_placement(const Netlist &nl) {
  Placement p(nl.cells.size());
  for (int c = 0; c < nl.num_cells(); ++c) {
    const Cell &cell = nl.cells[c];
    p.x[c] = cell.has_position ? cell.x : nl.region.x0;
    p.y[c] = cell.has_position ? cell.y : nl.region.y0;
  }
  return p;
}

double pin_x(const Netlist &nl, const Placement &p, int pin) {
  const Pin &pp = nl.pins[pin];
  return p.x[pp.cell] + pp.dx;
}

double pin_y(const Netlist &nl, const Placement &p, int pin) {
  const Pin &pp = nl.pins[pin];
  return p.y[pp.cell] + pp.dy;
}

double hpwl(const Netlist &nl, const Placement &p) {
  double total = 0.0;
  for (const Net &net : nl.nets) {
    if (net.pins.empty()) continue;
    double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
    for (int q : net.pins) {
      double x = pin_x(nl, p, q), y = pin_y(nl, p, q);
      xl = std::min(xl, x);
      xh = std::max(xh, x);
      yl = std::min(yl, y);
      yh = std::max(yh, y);
    }
    total += (xh - xl) + (yh - yl);
  }
  return total;
}

}  // namespace routeplace
