#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "routeplace/router.hpp"

namespace routeplace {

struct EvalStats {
  double nrmse = 0.0;
  bool nrmse_infinite = false;  // labels constant while predictions differ
  double ssim = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
};

/// RMSE(pred, label) / (max(label) - min(label)).
double nrmse(std::span<const double> pred, std::span<const double> label, bool *infinite = nullptr);

/// SSIM with one global window; R = max over both maps, C1 = (0.01R)^2, C2 = (0.03R)^2.
double ssim_global(std::span<const double> a, std::span<const double> b);

/// NaN when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);
/// Kendall tau-b.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> v);

EvalStats eval_stats(std::span<const double> pred_cell, std::span<const double> label_cell, const GridMap &pred_map,
                     const GridMap &label_map);

}  // namespace routeplace
