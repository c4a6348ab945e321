#include "routeplace/placer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "routeplace/router.hpp"
#include "routeplace/routegraph.hpp"
#include "routeplace/util.hpp"

namespace routeplace {

PlacerConfig PlacerConfig::from_config(const KeyValueConfig &c) {
  c.reject_unknown({"gamma_start", "gamma_end", "lambda_d", "lambda_ratio", "hpwl_ref", "eta", "eta_start_eo", "trust_region",
                    "target_density", "max_iters", "stop_eo", "density_n", "density_m", "initial_step", "momentum",
                    "max_halvings", "step_growth", "inflate", "exponent", "num_adjust", "trigger_eo", "feedback",
                    "seed"});
  PlacerConfig p;
  p.gamma_start = c.get_double("gamma_start", p.gamma_start);
  p.gamma_end = c.get_double("gamma_end", p.gamma_end);
  p.lambda_d = c.get_double("lambda_d", p.lambda_d);
  p.lambda_ratio = c.get_double("lambda_ratio", p.lambda_ratio);
  p.hpwl_ref = c.get_double("hpwl_ref", p.hpwl_ref);
  p.eta = c.get_double("eta", p.eta);
  p.eta_start_eo = c.get_double("eta_start_eo", p.eta_start_eo);
  p.trust_region = c.get_double("trust_region", p.trust_region);
  p.target_density = c.get_double("target_density", p.target_density);
  p.max_iters = static_cast<int>(c.get_int("max_iters", p.max_iters));
  p.stop_eo = c.get_double("stop_eo", p.stop_eo);
  p.density_n = static_cast<int>(c.get_int("density_n", p.density_n));
  p.density_m = static_cast<int>(c.get_int("density_m", p.density_m));
  p.initial_step = c.get_double("initial_step", p.initial_step);
  p.nag.momentum = c.get_double("momentum", p.nag.momentum);
  p.nag.max_halvings = static_cast<int>(c.get_int("max_halvings", p.nag.max_halvings));
  p.nag.growth = c.get_double("step_growth", p.nag.growth);
  p.inflation.enabled = c.get_bool("inflate", p.inflation.enabled);
  p.inflation.exponent = c.get_double("exponent", p.inflation.exponent);
  p.inflation.num_adjust = static_cast<int>(c.get_int("num_adjust", p.inflation.num_adjust));
  p.inflation.trigger_eo = c.get_double("trigger_eo", p.inflation.trigger_eo);
  std::string fb = c.get_string("feedback", "router");
  if (fb != "router" && fb != "gnn") throw ConfigError("feedback must be 'router' or 'gnn'");
  p.inflation.feedback = fb == "gnn" ? InflationFeedback::Gnn : InflationFeedback::Router;
  p.seed = c.get_u64("seed", p.seed);
  if (!(p.gamma_start > 0) || !(p.gamma_end > 0)) throw ConfigError("gamma must be positive");
  if (p.eta < 0) throw ConfigError("eta must be >= 0");
  if (p.inflation.enabled && p.inflation.num_adjust < 1) throw ConfigError("num_adjust must be >= 1");
  return p;
}

KeyValueConfig PlacerConfig::to_config() const {
  KeyValueConfig c;
  c.set("gamma_start", format_double(gamma_start));
  c.set("gamma_end", format_double(gamma_end));
  c.set("lambda_d", format_double(lambda_d));
  c.set("lambda_ratio", format_double(lambda_ratio));
  c.set("hpwl_ref", format_double(hpwl_ref));
  c.set("eta", format_double(eta));
  c.set("eta_start_eo", format_double(eta_start_eo));
  c.set("trust_region", format_double(trust_region));
  c.set("target_density", format_double(target_density));
  c.set("max_iters", std::to_string(max_iters));
  c.set("stop_eo", format_double(stop_eo));
  c.set("density_n", std::to_string(density_n));
  c.set("density_m", std::to_string(density_m));
  c.set("initial_step", format_double(initial_step));
  c.set("momentum", format_double(nag.momentum));
  c.set("max_halvings", std::to_string(nag.max_halvings));
  c.set("step_growth", format_double(nag.growth));
  c.set("inflate", inflation.enabled ? "1" : "0");
  c.set("exponent", format_double(inflation.exponent));
  c.set("num_adjust", std::to_string(inflation.num_adjust));
  c.set("trigger_eo", format_double(inflation.trigger_eo));
  c.set("feedback", inflation.feedback == InflationFeedback::Gnn ? "gnn" : "router");
  c.set("seed", std::to_string(seed));
  return c;
}

double lambda_multiplier(double delta_hpwl, int epoch, double hpwl_ref) {
  if (delta_hpwl < 0) return 1.05 * std::max(std::pow(0.999, epoch), 0.98);
  return 1.05 * std::pow(1.05, -delta_hpwl / hpwl_ref);
}

double lambda_update(double lambda_d, double delta_hpwl, int epoch, double hpwl_ref) {
  return lambda_d * lambda_multiplier(delta_hpwl, epoch, hpwl_ref);
}

CongestionTerm congestion_term_frozen(const Netlist &nl, const Placement &p, const RouteGnn &model,
                                      const GraphBundle &ref, bool want_gradient) {
  const BlockOrigins blocks = block_origins(ref.geom, nl.grid.m);
  GeomFeature geom = geom_features(nl, p, ref.rudy, &blocks);
  RawFeatures features = ref.features;
  for (int v = 0; v < nl.num_cells(); ++v) {
    features.cell(v, RawFeatures::kGh) = geom.g_h[v];
    features.cell(v, RawFeatures::kGv) = geom.g_v[v];
  }
  GnnActivations acts = model.forward(ref.graph, features);
  const std::vector<char> movable = movable_mask(nl);
  CongestionTerm out;
  out.value = congestion_penalty(acts.prediction, movable);
  out.prediction = acts.prediction;
  out.cell_grid = ref.graph.cell_grid;
  if (!want_gradient) return out;

  Eigen::VectorXd seed(nl.num_cells());
  for (int v = 0; v < nl.num_cells(); ++v) seed[v] = movable[v] ? 1.0 : 0.0;
  GnnGradients g = model.backward(acts, seed, /*want_params=*/false);
  GeomJacobian jac = geom_jacobian(nl, p, ref.rudy, &blocks);
  out.grad_x.assign(nl.cells.size(), 0.0);
  out.grad_y.assign(nl.cells.size(), 0.0);
  for (int v = 0; v < nl.num_cells(); ++v) {
    if (!movable[v]) continue;
    double dh = g.cell_features(v, RawFeatures::kGh), dv = g.cell_features(v, RawFeatures::kGv);
    out.grad_x[v] = dh * jac.dgh_dx[v] + dv * jac.dgv_dx[v];
    out.grad_y[v] = dh * jac.dgh_dy[v] + dv * jac.dgv_dy[v];
  }
  return out;
}

CongestionTerm congestion_term(const Netlist &nl, const Placement &p, const RouteGnn &model, bool want_gradient) {
  return congestion_term_frozen(nl, p, model, build_bundle(nl, p), want_gradient);
}

std::vector<double> inflation_ratios(const Netlist &nl, const Placement &p, const std::vector<double> &widths,
                                     const std::vector<double> &heights, const GridMap &congestion, double exponent) {
  const GridGeometry geo = nl.geometry();
  std::vector<double> ratios(nl.cells.size(), 1.0);
  for (int v = 0; v < nl.num_cells(); ++v) {
    if (nl.cells[v].fixed) continue;
    auto [i0, i1] = overlapped_range(p.x[v], p.x[v] + widths[v], geo.region.x0, geo.pitch_x(), geo.n);
    auto [j0, j1] = overlapped_range(p.y[v], p.y[v] + heights[v], geo.region.y0, geo.pitch_y(), geo.m);
    double increment = -std::numeric_limits<double>::infinity();
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) increment = std::max(increment, std::pow(congestion.at(i, j), exponent));
    ratios[v] = std::max(1.0, std::sqrt(increment));
  }
  return ratios;
}

GridMap gnn_congestion_map(const Netlist &nl, const Placement &p, const RouteGnn &model) {
  GraphBundle b = build_bundle(nl, p);
  Eigen::VectorXd pred = model.predict(b.graph, b.features);
  GridMap map = grid_map_from_cells(pred, b.graph);
  const double cap = 0.5 * (nl.grid.cap_h + nl.grid.cap_v);
  for (double &v : map.v) v = 1.0 + v / cap;
  return map;
}

GlobalPlacer::GlobalPlacer(const Netlist &nl, PlacerConfig cfg, const RouteGnn *model)
    : nl_(nl),
      cfg_(std::move(cfg)),
      model_(model),
      density_(nl.region, cfg_.density_n > 0 ? cfg_.density_n : nl.grid.n,
               cfg_.density_m > 0 ? cfg_.density_m : nl.grid.m) {
  if (cfg_.eta > 0 && model_ == nullptr) throw PlacementError("a RouteGNN model is required when eta > 0");
  widths_.resize(nl.cells.size());
  heights_.resize(nl.cells.size());
  for (int v = 0; v < nl.num_cells(); ++v) {
    widths_[v] = nl.cells[v].width;
    heights_[v] = nl.cells[v].height;
  }
}

double GlobalPlacer::gamma_for(double eo) const {
  const GridGeometry geo = nl_.geometry();
  const double pitch = 0.5 * (geo.pitch_x() + geo.pitch_y());
  double span = 1.0 - cfg_.stop_eo;
  double t = span > 0 ? std::clamp((1.0 - eo) / span, 0.0, 1.0) : 1.0;
  return pitch * cfg_.gamma_start * std::pow(cfg_.gamma_end / cfg_.gamma_start, t);
}

Placement GlobalPlacer::lower_left(const std::vector<double> &c, bool inflated) const {
  const int nc = nl_.num_cells();
  Placement p(nc);
  for (int v = 0; v < nc; ++v) {
    double w = inflated ? widths_[v] : nl_.cells[v].width;
    double h = inflated ? heights_[v] : nl_.cells[v].height;
    p.x[v] = c[v] - 0.5 * w;
    p.y[v] = c[nc + v] - 0.5 * h;
  }
  return p;
}

Placement GlobalPlacer::placement() const { return lower_left(state_.x, false); }
Placement GlobalPlacer::inflated_placement() const { return lower_left(state_.x, true); }

double GlobalPlacer::electric_overflow_now() const {
  return electric_overflow(nl_, inflated_placement(), cfg_.target_density, &widths_, &heights_);
}

void GlobalPlacer::project(std::vector<double> &c) const {
  const int nc = nl_.num_cells();
  const LayoutRegion &r = nl_.region;
  for (int v = 0; v < nc; ++v) {
    const Cell &cell = nl_.cells[v];
    if (cell.fixed) {
      c[v] = cell.x + 0.5 * cell.width;
      c[nc + v] = cell.y + 0.5 * cell.height;
      continue;
    }
    double hw = 0.5 * widths_[v], hh = 0.5 * heights_[v];
    double lo_x = r.x0 + hw, hi_x = r.x1 - hw, lo_y = r.y0 + hh, hi_y = r.y1 - hh;
    c[v] = lo_x <= hi_x ? std::clamp(c[v], lo_x, hi_x) : 0.5 * (r.x0 + r.x1);
    c[nc + v] = lo_y <= hi_y ? std::clamp(c[nc + v], lo_y, hi_y) : 0.5 * (r.y0 + r.y1);
  }
}

double GlobalPlacer::evaluate(const std::vector<double> &c, std::vector<double> *grad, Eval *parts) {
  const int nc = nl_.num_cells();
  const Placement pins_at = lower_left(c, false);
  const Placement bodies_at = lower_left(c, true);
  ObjectiveTerm wl = wirelength(nl_, pins_at, gamma_);
  ObjectiveTerm d = density_.evaluate(nl_, bodies_at, &widths_, &heights_);
  Eval e{wl.value, d.value, 0.0};
  CongestionTerm cong;
  if (congestion_on_) {
    cong = congestion_term_frozen(nl_, pins_at, *model_, *reference_, grad != nullptr);
    e.congestion = cong.value;
  }
  if (grad) {
    grad->assign(2 * nc, 0.0);
    for (int v = 0; v < nc; ++v) {
      if (nl_.cells[v].fixed) continue;
      double gx = wl.grad_x[v] + lambda_ * d.grad_x[v];
      double gy = wl.grad_y[v] + lambda_ * d.grad_y[v];
      if (congestion_on_) {
        gx += cfg_.eta * cong.grad_x[v];
        gy += cfg_.eta * cong.grad_y[v];
      }
      (*grad)[v] = gx;
      (*grad)[nc + v] = gy;
    }
  }
  if (parts) *parts = e;
  return e.wl + lambda_ * e.density + cfg_.eta * e.congestion;
}

void GlobalPlacer::refresh_congestion_reference() {
  if (congestion_on_) {
    reference_ = build_bundle(nl_, placement());
  } else {
    reference_.reset();
  }
}

void GlobalPlacer::rescale_step_for_congestion() {
  // Keeps the largest move unchanged when the congestion gradient switches on.
  std::vector<double> with(state_.x.size());
  evaluate(state_.x, &with, nullptr);
  congestion_on_ = false;
  std::vector<double> without(state_.x.size());
  evaluate(state_.x, &without, nullptr);
  congestion_on_ = true;
  double gw = 0, go = 0;
  for (std::size_t k = 0; k < with.size(); ++k) {
    gw = std::max(gw, std::abs(with[k]));
    go = std::max(go, std::abs(without[k]));
  }
  if (gw > 0 && go > 0) state_.step *= go / gw;
  state_.velocity.assign(state_.x.size(), 0.0);
}

bool GlobalPlacer::congestion_active(double eo) const {
  if (!(cfg_.eta > 0) || model_ == nullptr) return false;
  return cfg_.eta_start_eo >= 1.0 || eo < cfg_.eta_start_eo;
}

void GlobalPlacer::initialize() {
  const int nc = nl_.num_cells();
  double sx = 0, sy = 0;
  int count = 0;
  for (const Pin &pin : nl_.pins) {
    const Cell &cell = nl_.cells[pin.cell];
    if (!cell.fixed) continue;
    sx += cell.x + pin.dx;
    sy += cell.y + pin.dy;
    ++count;
  }
  const LayoutRegion &r = nl_.region;
  double cx = count ? sx / count : 0.5 * (r.x0 + r.x1);
  double cy = count ? sy / count : 0.5 * (r.y0 + r.y1);
  std::mt19937_64 rng(cfg_.seed);
  auto jitter = [&](double extent) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * 0.01 * extent;
  };
  state_ = NagState{};
  state_.x.assign(2 * nc, 0.0);
  for (int v = 0; v < nc; ++v) {
    state_.x[v] = cx + jitter(r.width());
    state_.x[nc + v] = cy + jitter(r.height());
  }
  project(state_.x);
  state_.velocity.assign(2 * nc, 0.0);

  eo_ = electric_overflow_now();
  gamma_ = gamma_for(eo_);
  hpwl_ = hpwl(nl_, placement());
  congestion_on_ = false;

  const Placement pins_at = lower_left(state_.x, false);
  ObjectiveTerm wl = wirelength(nl_, pins_at, gamma_);
  ObjectiveTerm d = density_.evaluate(nl_, lower_left(state_.x, true), &widths_, &heights_);
  double wl_norm = 0, d_norm = 0;
  for (int v = 0; v < nc; ++v) {
    wl_norm += std::abs(wl.grad_x[v]) + std::abs(wl.grad_y[v]);
    d_norm += std::abs(d.grad_x[v]) + std::abs(d.grad_y[v]);
  }
  if (cfg_.lambda_d > 0) {
    lambda_ = cfg_.lambda_d;
  } else {
    lambda_ = d_norm > 0 && wl_norm > 0 ? cfg_.lambda_ratio * wl_norm / d_norm : cfg_.lambda_ratio;
  }
  double gmax = 0;
  for (int v = 0; v < nc; ++v) {
    gmax = std::max(gmax, std::abs(wl.grad_x[v] + lambda_ * d.grad_x[v]));
    gmax = std::max(gmax, std::abs(wl.grad_y[v] + lambda_ * d.grad_y[v]));
  }
  const GridGeometry geo = nl_.geometry();
  double pitch = 0.5 * (geo.pitch_x() + geo.pitch_y());
  state_.step = gmax > 0 ? cfg_.initial_step * pitch / gmax : 1.0;
  trace_.clear();
  initialized_ = true;
}

bool GlobalPlacer::run_until(double target_eo, const IterationObserver &observer) {
  if (!initialized_) initialize();
  Objective f = [this](const std::vector<double> &x, std::vector<double> *g) { return evaluate(x, g, nullptr); };
  Projection proj = [this](std::vector<double> &x) { project(x); };
  const GridGeometry geo = nl_.geometry();
  const double pitch = 0.5 * (geo.pitch_x() + geo.pitch_y());
  while (eo_ > target_eo && state_.iteration < cfg_.max_iters) {
    const bool was_on = congestion_on_;
    congestion_on_ = congestion_active(eo_);
    refresh_congestion_reference();
    gamma_ = gamma_for(eo_);
    if (congestion_on_ && !was_on) rescale_step_for_congestion();
    state_.value = evaluate(state_.x, nullptr, nullptr);
    // The congestion term is linearized around the reference placement, so
    // moves are kept local while it is active.
    NagConfig nag = cfg_.nag;
    if (congestion_on_ && cfg_.trust_region > 0) nag.max_move = cfg_.trust_region * pitch;
    NagStepInfo info = nag_step(state_, f, nag, proj);
    if (log_level() == LogLevel::Debug) {
      log_debug("iter " + std::to_string(state_.iteration) + " step " + format_double(state_.step) + " halvings " +
                std::to_string(info.halvings) + (info.restarted ? " restart" : "") + (info.accepted_increase ? " uphill" : ""));
    }

    Eval parts;
    evaluate(state_.x, nullptr, &parts);
    const Placement p = placement();
    double new_hpwl = hpwl(nl_, p);
    lambda_ = lambda_update(lambda_, new_hpwl - hpwl_, state_.iteration - 1, cfg_.hpwl_ref);
    hpwl_ = new_hpwl;
    eo_ = electric_overflow_now();

    TraceRow row{state_.iteration, hpwl_, eo_, parts.wl, parts.density, parts.congestion, lambda_, gamma_};
    trace_.push_back(row);
    if (observer) observer(row, p);
  }
  return eo_ <= target_eo;
}

void GlobalPlacer::scale_sizes(const std::vector<double> &ratios) {
  for (int v = 0; v < nl_.num_cells(); ++v) {
    if (nl_.cells[v].fixed) continue;
    double r = std::max(1.0, ratios[v]);
    widths_[v] *= r;
    heights_[v] *= r;
  }
  project(state_.x);
  state_.velocity.assign(state_.x.size(), 0.0);
  eo_ = electric_overflow_now();
}

PlaceResult place(const Netlist &nl, const PlacerConfig &cfg, const RouteGnn *model, const IterationObserver &observer) {
  if (cfg.eta > 0 && model == nullptr) throw PlacementError("a RouteGNN model is required when eta > 0");
  if (cfg.inflation.enabled && cfg.inflation.feedback == InflationFeedback::Gnn && model == nullptr) {
    throw PlacementError("GNN inflation feedback requires a model");
  }
  GlobalPlacer gp(nl, cfg, model);
  gp.initialize();
  PlaceResult res;
  if (cfg.inflation.enabled) {
    for (int round = 0; round < cfg.inflation.num_adjust; ++round) {
      if (!gp.run_until(cfg.inflation.trigger_eo, observer)) break;
      GridMap congestion = cfg.inflation.feedback == InflationFeedback::Router
                               ? congestion_ratio(route(nl, gp.placement()))
                               : gnn_congestion_map(nl, gp.placement(), *model);
      gp.scale_sizes(
          inflation_ratios(nl, gp.inflated_placement(), gp.widths(), gp.heights(), congestion, cfg.inflation.exponent));
      ++res.inflation_rounds;
    }
  }
  res.converged = gp.run_until(cfg.stop_eo, observer);
  res.placement = gp.placement();
  res.trace = gp.trace();
  return res;
}

std::string write_trace_csv(const std::vector<TraceRow> &trace) {
  std::string out = "iter,hpwl,eo,wl,density,congestion,lambda_d,gamma\n";
  for (const TraceRow &r : trace) {
    out += std::to_string(r.iter) + "," + format_double(r.hpwl) + "," + format_double(r.eo) + "," +
           format_double(r.wl) + "," + format_double(r.density) + "," + format_double(r.congestion) + "," +
           format_double(r.lambda_d) + "," + format_double(r.gamma) + "\n";
  }
  return out;
}

}  // namespace routeplace
