#include "routeplace/nag.hpp"

#include <algorithm>
#include <cmath>

namespace routeplace {

NagStepInfo nag_step(NagState &s, const Objective &f, const NagConfig &cfg, const Projection &project) {
  const std::size_t n = s.x.size();
  if (s.velocity.size() != n) s.velocity.assign(n, 0.0);

  std::vector<double> look(n), grad(n);
  for (std::size_t k = 0; k < n; ++k) look[k] = s.x[k] + cfg.momentum * s.velocity[k];
  if (project) project(look);
  f(look, &grad);
  for (double g : grad) {
    if (!std::isfinite(g)) throw DivergenceError("non-finite gradient at iteration " + std::to_string(s.iteration));
  }

  NagStepInfo info;
  const double initial_step = s.step;
  std::vector<double> trial(n);
  double value = 0.0;
  // Backtracks on the step size; returns true once the trial does not increase f.
  auto search = [&](const std::vector<double> &velocity, double momentum) {
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) {
        double d = momentum * velocity[k] - s.step * grad[k];
        if (cfg.max_move > 0) d = std::clamp(d, -cfg.max_move, cfg.max_move);
        trial[k] = s.x[k] + d;
      }
      if (project) project(trial);
      value = f(trial, nullptr);
      if (std::isfinite(value) && value <= s.value) return true;
      if (info.halvings == cfg.max_halvings) return false;
      s.step *= 0.5;
      ++info.halvings;
    }
  };
  bool descended = search(s.velocity, cfg.momentum);
  if (!descended) {
    // Halving cannot undo a bad momentum term: restart from zero velocity with
    // a plain gradient step taken at x itself.
    info.restarted = true;
    f(s.x, &grad);
    for (double g : grad) {
      if (!std::isfinite(g)) throw DivergenceError("non-finite gradient at iteration " + std::to_string(s.iteration));
    }
    s.step = initial_step;
    info.halvings = 0;
    descended = search(std::vector<double>(n, 0.0), 0.0);
    if (!descended && !std::isfinite(value)) {
      throw DivergenceError("objective non-finite after " + std::to_string(cfg.max_halvings) +
                            " step halvings at iteration " + std::to_string(s.iteration));
    }
  }
  if (!descended) {
    info.accepted_increase = true;
    s.velocity.assign(n, 0.0);
    s.step = 0.5 * initial_step;
  } else {
    for (std::size_t k = 0; k < n; ++k) s.velocity[k] = trial[k] - s.x[k];
    if (!info.restarted) s.step *= cfg.growth;
  }
  s.x = std::move(trial);
  s.value = value;
  ++s.iteration;
  return info;
}

}  // namespace routeplace
