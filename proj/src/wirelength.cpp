#include "routeplace/wirelength.hpp"

#include <algorithm>
#include <cmath>

namespace routeplace {

namespace {

// Adds d(WA)/d(coord) * 1 into grad for each pin; returns WA.
double wa_axis(const std::vector<double> &c, double gamma, std::vector<double> *grad) {
  const std::size_t k = c.size();
  if (k < 2) {
    if (grad) grad->assign(k, 0.0);
    return 0.0;
  }
  double cmax = *std::max_element(c.begin(), c.end());
  double cmin = *std::min_element(c.begin(), c.end());
  double sp = 0, xp = 0, sm = 0, xm = 0;
  thread_local std::vector<double> a, b;
  a.resize(k);
  b.resize(k);
  for (std::size_t q = 0; q < k; ++q) {
    a[q] = std::exp((c[q] - cmax) / gamma);
    b[q] = std::exp((cmin - c[q]) / gamma);
    sp += a[q];
    xp += c[q] * a[q];
    sm += b[q];
    xm += c[q] * b[q];
  }
  double wa_plus = xp / sp, wa_minus = xm / sm;
  if (grad) {
    grad->resize(k);
    for (std::size_t q = 0; q < k; ++q) {
      double gp = a[q] / sp * (1.0 + (c[q] - wa_plus) / gamma);
      double gm = b[q] / sm * (1.0 - (c[q] - wa_minus) / gamma);
      (*grad)[q] = gp - gm;
    }
  }
  return wa_plus - wa_minus;
}

}  // namespace

double weighted_average_span(const std::vector<double> &coords, double gamma) {
  return wa_axis(coords, gamma, nullptr);
}

ObjectiveTerm wirelength(const Netlist &nl, const Placement &p, double gamma) {
  ObjectiveTerm out;
  out.grad_x.assign(nl.cells.size(), 0.0);
  out.grad_y.assign(nl.cells.size(), 0.0);
  std::vector<double> xs, ys, gx, gy;
  for (const Net &net : nl.nets) {
    xs.clear();
    ys.clear();
    for (int q : net.pins) {
      xs.push_back(pin_x(nl, p, q));
      ys.push_back(pin_y(nl, p, q));
    }
    out.value += wa_axis(xs, gamma, &gx) + wa_axis(ys, gamma, &gy);
    for (std::size_t k = 0; k < net.pins.size(); ++k) {
      int cell = nl.pins[net.pins[k]].cell;
      out.grad_x[cell] += gx[k];
      out.grad_y[cell] += gy[k];
    }
  }
  for (int v = 0; v < nl.num_cells(); ++v) {
    if (nl.cells[v].fixed) out.grad_x[v] = out.grad_y[v] = 0.0;
  }
  return out;
}

}  // namespace routeplace
