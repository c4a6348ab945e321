#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace routeplace {

struct NagConfig {
  double momentum = 0.9;
  int max_halvings = 10;
  double growth = 1.05;
  double max_move = 0.0;  // per-coordinate displacement cap per step; 0 disables it
};

struct NagState {
  std::vector<double> x;
  std::vector<double> velocity;
  double step = 1.0;
  double value = 0.0;  // objective at x; the caller refreshes it when the objective changes
  int iteration = 0;
};

struct NagStepInfo {
  int halvings = 0;
  bool restarted = false;          // momentum step failed; a plain gradient step from x was tried
  bool accepted_increase = false;  // the gradient step also failed; the last trial was taken anyway
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Objective value; fills `grad` when non-null.
using Objective = std::function<double(const std::vector<double> &x, std::vector<double> *grad)>;
/// In-place projection onto the feasible set (may be empty).
using Projection = std::function<void(std::vector<double> &x)>;

/// One Nesterov step with backtracking on the step size:
///   v <- momentum * v - step * grad f(x + momentum * v);  x <- x + v.
/// The step halves while f(x_new) > f(x), at most max_halvings times, and
/// grows by `growth` after an accepted decrease. When every halving fails the
/// velocity is dropped and a plain gradient step from x is searched the same
/// way. If that fails too, the last trial is accepted and the step becomes half
/// of its value at the start of the call. With max_move > 0 every coordinate of
/// the trial point stays within max_move of x.
NagStepInfo nag_step(NagState &state, const Objective &f, const NagConfig &cfg, const Projection &project = {});

}  // namespace routeplace
