#include <doctest.h>

#include "routeplace/density.hpp"
#include "routeplace/nag.hpp"
#include "routeplace/placer.hpp"
#include "routeplace/synthetic.hpp"
#include "routeplace/wirelength.hpp"
#include "support.hpp"

using namespace routeplace;

namespace {

// Netlist of point-like cells with pins at their lower-left corners.
Netlist point_netlist(int cells, double size) {
  Netlist nl;
  nl.region = {0, 0, size, size};
  nl.grid = {4, 4, 1, 1};
  Cell c;
  c.width = c.height = 0;
  nl.cells.assign(cells, c);
  return nl;
}

void connect(Netlist &nl, const std::vector<int> &cells) {
  Net net;
  int e = nl.num_nets();
  for (int v : cells) {
    net.pins.push_back(nl.num_pins());
    nl.pins.push_back({v, e, PinDirection::Input, 0, 0});
  }
  nl.nets.push_back(net);
}

double hpwl_oracle(const Netlist &nl, const Placement &p) {
  double total = 0;
  for (const Net &net : nl.nets) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (int q : net.pins) {
      double x = p.x[nl.pins[q].cell] + nl.pins[q].dx, y = p.y[nl.pins[q].cell] + nl.pins[q].dy;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    total += (x1 - x0) + (y1 - y0);
  }
  return total;
}

// Largest error between an analytic gradient and central differences over every
// movable coordinate, relative to the largest gradient entry of the instance.
// Entries that are zero analytically would otherwise compare against pure
// rounding noise.
template <class F>
double coordinate_fd_error(const Netlist &nl, const Placement &p, const std::vector<double> &gx,
                           const std::vector<double> &gy, double h, F value, int *probes) {
  double scale = 1e-300;
  for (int v = 0; v < nl.num_cells(); ++v) scale = std::max({scale, std::abs(gx[v]), std::abs(gy[v])});
  double worst = 0;
  for (int v = 0; v < nl.num_cells(); ++v) {
    if (nl.cells[v].fixed) continue;
    for (int axis = 0; axis < 2; ++axis) {
      Placement a = p, b = p;
      (axis == 0 ? a.x : a.y)[v] += h;
      (axis == 0 ? b.x : b.y)[v] -= h;
      double fd = (value(a) - value(b)) / (2 * h);
      double g = axis == 0 ? gx[v] : gy[v];
      worst = std::max(worst, rp_test::rel_error(g, fd, scale));
      ++*probes;
    }
  }
  return worst;
}

Netlist small_synthetic(std::uint64_t seed, int cells) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.cell_count = cells;
  spec.net_count = cells * 9 / 10;
  spec.grid = {8, 8, 4, 4};
  return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("weighted-average wirelength") {
  SUBCASE("pins at one point") {
    Netlist nl = point_netlist(2, 4);
    connect(nl, {0, 1});
    Placement p(2);
    p.x = {1.5, 1.5};
    p.y = {2, 2};
    ObjectiveTerm t = wirelength(nl, p, 0.7);
    CHECK(t.value == 0);
    CHECK(t.grad_x == std::vector<double>{0, 0});
    CHECK(t.grad_y == std::vector<double>{0, 0});
  }
  SUBCASE("unit span with gamma 1") {
    const double e = std::exp(1.0);
    CHECK(weighted_average_span({0.0, 1.0}, 1.0) == doctest::Approx((e - 1) / (e + 1)).epsilon(1e-15));
    Netlist nl = point_netlist(2, 4);
    connect(nl, {0, 1});
    Placement p(2);
    p.x = {0, 1};
    CHECK(wirelength(nl, p, 1.0).value == doctest::Approx((e - 1) / (e + 1)).epsilon(1e-15));
  }
  SUBCASE("bounded by HPWL and close to it for small gamma") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> xs(rp_test::uniform_int(rng, 2, 8));
      for (double &x : xs) x = rp_test::uniform(rng, -50, 900);
      double span = *std::max_element(xs.begin(), xs.end()) - *std::min_element(xs.begin(), xs.end());
      CHECK(weighted_average_span(xs, 0.1 * span) <= span);
      CHECK(weighted_average_span(xs, 0.1 * span) >= 0);
      CHECK(std::abs(weighted_average_span(xs, 1e-3 * span) - span) <= 0.01 * span);
    }
    rp_test::RandomSpec s;
    s.cells = 30;
    s.nets = 25;
    Netlist nl = rp_test::random_netlist(rng, s);
    Placement p = rp_test::random_placement(rng, nl);
    CHECK(wirelength(nl, p, 2.0).value <= hpwl_oracle(nl, p));
    CHECK(hpwl(nl, p) == doctest::Approx(hpwl_oracle(nl, p)).epsilon(1e-14));
  }
  SUBCASE("gradient matches central differences") {
    std::mt19937_64 rng(30);
    double worst = 0;
    int probes = 0;
    for (int t = 0; t < 20; ++t) {
      rp_test::RandomSpec s;
      s.cells = 12;
      s.nets = 10;
      Netlist nl = rp_test::random_netlist(rng, s);
      Placement p = rp_test::random_placement(rng, nl);
      const double gamma = rp_test::uniform(rng, 0.5, 4.0);
      ObjectiveTerm g = wirelength(nl, p, gamma);
      worst = std::max(worst, coordinate_fd_error(nl, p, g.grad_x, g.grad_y, 1e-5,
                                                  [&](const Placement &q) { return wirelength(nl, q, gamma).value; },
                                                  &probes));
    }
    CHECK(probes >= 50);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("electrostatic density") {
  SUBCASE("uniform density has no energy and no force") {
    Netlist nl;
    nl.region = {0, 0, 4, 4};
    nl.grid = {4, 4, 1, 1};
    Cell c;
    c.width = c.height = 2;
    nl.cells.assign(4, c);
    Placement p(4);
    p.x = {0, 2, 0, 2};
    p.y = {0, 0, 2, 2};
    ObjectiveTerm d = density(nl, p, 4, 4);
    CHECK(std::abs(d.value) < 1e-12);
    for (int v = 0; v < 4; ++v) {
      CHECK(std::abs(d.grad_x[v]) < 1e-12);
      CHECK(std::abs(d.grad_y[v]) < 1e-12);
    }
  }
  SUBCASE("stacked cells are pushed apart") {
    Netlist nl;
    nl.region = {0, 0, 16, 16};
    nl.grid = {16, 16, 1, 1};
    Cell c;
    c.width = c.height = 0.1;
    nl.cells.assign(2, c);
    Placement p(2);
    p.x = {7.6, 8.3};
    p.y = {7.95, 7.95};
    ObjectiveTerm d = density(nl, p, 16, 16);
    // Descent moves along -grad: the left cell goes left, the right cell right.
    CHECK(d.grad_x[0] > 0);
    CHECK(d.grad_x[1] < 0);
  }
  SUBCASE("gradient matches central differences") {
    std::mt19937_64 rng(40);
    double worst = 0;
    int probes = 0;
    for (int t = 0; t < 20; ++t) {
      rp_test::RandomSpec s;
      s.cells = 8;
      s.nets = 2;
      s.n = 6;
      s.m = 5;
      Netlist nl = rp_test::random_netlist(rng, s);
      Placement p = rp_test::random_placement(rng, nl);
      ObjectiveTerm g = density(nl, p, 6, 5);
      worst = std::max(worst, coordinate_fd_error(nl, p, g.grad_x, g.grad_y, 1e-5,
                                                  [&](const Placement &q) { return density(nl, q, 6, 5).value; },
                                                  &probes));
    }
    CHECK(probes >= 50);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("density weight update") {
  CHECK(lambda_multiplier(0.0, 0) == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(lambda_multiplier(-10.0, 0) == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(lambda_multiplier(350000.0, 7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_multiplier(-1.0, 5000) == doctest::Approx(1.05 * 0.98).epsilon(1e-15));
  CHECK(lambda_multiplier(-1.0, 10) == doctest::Approx(1.05 * std::pow(0.999, 10)).epsilon(1e-15));
  CHECK(lambda_update(2.0, 0.0, 3) == doctest::Approx(2.1).epsilon(1e-15));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    double mu = lambda_multiplier(rp_test::uniform(rng, -1e6, 1e7), rp_test::uniform_int(rng, 0, 3000));
    CHECK(mu > 0);
    CHECK(mu <= 1.05 * 1.05);
  }
}

TEST_CASE("frozen congestion term") {
  SUBCASE("gradient matches central differences") {
    std::mt19937_64 rng(60);
    double worst = 0;
    int probes = 0;
    for (int t = 0; t < 20; ++t) {
      rp_test::RandomSpec s;
      s.cells = 8;
      s.nets = 8;
      s.n = 5;
      s.m = 5;
      Netlist nl = rp_test::random_netlist(rng, s);
      Placement p = rp_test::random_placement(rng, nl);
      GraphBundle ref = build_bundle(nl, p);
      RouteGnn model(GnnParams::glorot(GnnDims{}, 100 + t), FeatureStats::fit({&ref.features}));
      CongestionTerm c = congestion_term_frozen(nl, p, model, ref);
      const double h = 1e-5 * nl.geometry().pitch_x();
      worst = std::max(worst, coordinate_fd_error(nl, p, c.grad_x, c.grad_y, h, [&](const Placement &q) {
                         return congestion_term_frozen(nl, q, model, ref, false).value;
                       }, &probes));
      // At the reference point the frozen term equals the full one.
      CHECK(c.value == doctest::Approx(congestion_term(nl, p, model, false).value).epsilon(1e-12));
    }
    CHECK(probes >= 50);
    CHECK(worst <= 1e-4);
  }
  SUBCASE("uniform RUDY gives no positional gradient") {
    // Every net spans the whole region, so RUDY is uniform.
    Netlist nl;
    nl.region = {0, 0, 6, 6};
    nl.grid = {3, 3, 2, 2};
    Cell corner;
    corner.width = corner.height = 0;
    corner.fixed = corner.has_position = true;
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{6.0, 6.0}}) {
      corner.x = x;
      corner.y = y;
      nl.cells.push_back(corner);
    }
    Cell c;
    c.width = c.height = 0.5;
    for (int k = 0; k < 4; ++k) nl.cells.push_back(c);
    for (int k = 0; k < 4; ++k) connect(nl, {0, 1, 2 + k});
    Placement p(6);
    p.x = {0, 6, 1.1, 2.3, 3.7, 4.2};
    p.y = {0, 6, 0.9, 4.4, 2.2, 1.6};
    GraphBundle ref = build_bundle(nl, p);
    RouteGnn model(GnnParams::glorot(GnnDims{}, 4), FeatureStats::fit({&ref.features}));
    CongestionTerm t = congestion_term(nl, p, model);
    for (int v = 0; v < 6; ++v) {
      CHECK(std::abs(t.grad_x[v]) < 1e-12);
      CHECK(std::abs(t.grad_y[v]) < 1e-12);
    }
  }
}

TEST_CASE("Nesterov step") {
  Objective square = [](const std::vector<double> &x, std::vector<double> *g) {
    if (g) *g = {2 * x[0]};
    return x[0] * x[0];
  };
  SUBCASE("quadratic converges monotonically") {
    NagState s;
    s.x = {1.0};
    s.velocity = {0.0};
    s.step = 0.1;
    s.value = 1.0;
    NagConfig cfg;
    int steps = 0;
    while (std::abs(s.x[0]) >= 1e-3 && steps < 200) {
      double before = s.x[0] * s.x[0];
      nag_step(s, square, cfg);
      CHECK(s.x[0] * s.x[0] <= before);
      s.value = s.x[0] * s.x[0];
      ++steps;
    }
    CHECK(std::abs(s.x[0]) < 1e-3);
  }
  SUBCASE("zero gradient leaves the point unchanged") {
    Objective flat = [](const std::vector<double> &x, std::vector<double> *g) {
      if (g) g->assign(x.size(), 0.0);
      return 3.0;
    };
    NagState s;
    s.x = {1.5, -2.0, 7.0};
    s.velocity.assign(3, 0.0);
    s.value = 3.0;
    for (int k = 0; k < 5; ++k) nag_step(s, flat, NagConfig{});
    CHECK(s.x == std::vector<double>{1.5, -2.0, 7.0});
  }
  SUBCASE("zero momentum is gradient descent") {
    NagConfig cfg;
    cfg.momentum = 0;
    cfg.growth = 1.0;
    NagState s;
    s.x = {1.0};
    s.velocity = {0.0};
    s.step = 0.1;
    s.value = 1.0;
    double x = 1.0;
    for (int k = 0; k < 20; ++k) {
      nag_step(s, square, cfg);
      s.value = s.x[0] * s.x[0];
      x -= 0.1 * 2 * x;
      CHECK(s.x[0] == doctest::Approx(x).epsilon(1e-15));
    }
  }
  SUBCASE("move cap") {
    NagConfig cfg;
    cfg.max_move = 0.05;
    NagState s;
    s.x = {1.0};
    s.velocity = {0.0};
    s.step = 0.4;
    s.value = 1.0;
    nag_step(s, square, cfg);
    CHECK(s.x[0] == doctest::Approx(0.95).epsilon(1e-15));
  }
}

TEST_CASE("placement runs") {
  SUBCASE("a single net shrinks") {
    Netlist nl;
    nl.region = {0, 0, 1000, 1000};
    nl.grid = {10, 10, 5, 5};
    Cell c;
    c.width = c.height = 1;
    nl.cells.assign(4, c);
    connect(nl, {0, 1, 2, 3});
    PlacerConfig cfg;
    cfg.max_iters = 60;
    cfg.lambda_ratio = 1e-6;
    GlobalPlacer gp(nl, cfg);
    gp.initialize();
    double before = hpwl(nl, gp.placement());
    gp.run_until(-1.0);  // EO is already tiny; run the whole budget
    CHECK(hpwl(nl, gp.placement()) < before);
  }
  SyntheticSpec spec;
  spec.seed = 3;
  spec.grid = {16, 16, 3, 3};
  Netlist nl = generate_synthetic(spec);
  PlacerConfig cfg;
  cfg.seed = 3;
  PlaceResult a = place(nl, cfg);
  SUBCASE("identical configuration gives an identical trace") {
    PlaceResult b = place(nl, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(write_trace_csv(a.trace) == write_trace_csv(b.trace));
    CHECK(a.placement == b.placement);
  }
  SUBCASE("trace invariants") {
    REQUIRE(a.trace.size() > 60);
    int good = 0, windows = 0;
    for (std::size_t t = 0; t + 50 < a.trace.size(); ++t, ++windows) good += a.trace[t + 50].eo <= a.trace[t].eo;
    CHECK(good >= 0.8 * windows);
    for (std::size_t t = 1; t < a.trace.size(); ++t) {
      CHECK(a.trace[t].lambda_d > 0);
      CHECK(a.trace[t].lambda_d / a.trace[t - 1].lambda_d <= 1.05 * 1.05 + 1e-12);
      CHECK(a.trace[t].iter == a.trace[t - 1].iter + 1);
    }
    CHECK(a.converged);
    CHECK(a.trace.back().eo <= cfg.stop_eo);
    CHECK(std::abs(a.trace.back().eo - electric_overflow(nl, a.placement)) <= 1e-9);
  }
  SUBCASE("eta > 0 needs a model") {
    PlacerConfig c = cfg;
    c.eta = 0.1;
    CHECK_THROWS_AS(place(nl, c), PlacementError);
  }
}

TEST_CASE("cell inflation") {
  Netlist nl;
  nl.region = {0, 0, 2, 1};
  nl.grid = {2, 1, 1, 1};
  Cell c;
  c.width = 1;
  c.height = 0.5;
  nl.cells = {c};
  Placement p(1);
  p.x[0] = 0.5;
  p.y[0] = 0.25;
  std::vector<double> w = {1}, h = {0.5};
  SUBCASE("worked example") {
    GridMap cong(2, 1);
    cong.v = {1.0, 4.0};
    std::vector<double> r = inflation_ratios(nl, p, w, h, cong, 1.5);
    CHECK(std::abs(r[0] - std::sqrt(std::pow(4.0, 1.5))) <= 1e-12);
    CHECK(std::abs(r[0] - std::sqrt(8.0)) <= 1e-12);
  }
  SUBCASE("unit congestion is a fixed point") {
    for (double e : {0.5, 1.0, 1.5, 3.0}) CHECK(inflation_ratios(nl, p, w, h, GridMap(2, 1, 1.0), e)[0] == 1.0);
  }
  SUBCASE("cells never shrink") {
    GridMap cong(2, 1, 0.25);
    CHECK(inflation_ratios(nl, p, w, h, cong, 2.0)[0] == 1.0);
    PlacerConfig cfg;
    cfg.density_n = cfg.density_m = 2;
    GlobalPlacer gp(nl, cfg);
    gp.initialize();
    gp.scale_sizes({0.5});
    CHECK(gp.widths()[0] == 1.0);
    gp.scale_sizes({1.5});
    CHECK(gp.widths()[0] == 1.5);
    CHECK(gp.placement() == gp.placement());
  }
  SUBCASE("inflated runs report original sizes and grow monotonically") {
    Netlist big = small_synthetic(4, 300);
    PlacerConfig cfg;
    cfg.seed = 4;
    cfg.inflation.enabled = true;
    cfg.inflation.num_adjust = 2;
    PlaceResult r = place(big, cfg);
    CHECK(r.inflation_rounds >= 1);
    CHECK(r.placement.size() == big.cells.size());
  }
}
