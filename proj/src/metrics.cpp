#include "routeplace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace routeplace {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("metric inputs differ in length");
  if (a.size() < 2) throw std::invalid_argument("metrics need at least two samples");
}

}  // namespace

double nrmse(std::span<const double> pred, std::span<const double> label, bool *infinite) {
  check_lengths(pred, label);
  double se = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) se += (pred[k] - label[k]) * (pred[k] - label[k]);
  double rmse = std::sqrt(se / static_cast<double>(pred.size()));
  auto [lo, hi] = std::minmax_element(label.begin(), label.end());
  double range = *hi - *lo;
  if (infinite) *infinite = false;
  if (range == 0.0) {
    if (rmse == 0.0) return 0.0;
    if (infinite) *infinite = true;
    return std::numeric_limits<double>::infinity();
  }
  return rmse / range;
}

double ssim_global(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  const double n = static_cast<double>(a.size());
  double r = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
  double c1 = (0.01 * r) * (0.01 * r), c2 = (0.03 * r) * (0.03 * r);
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double va = 0, vb = 0, cov = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    va += (a[k] - ma) * (a[k] - ma);
    vb += (b[k] - mb) * (b[k] - mb);
    cov += (a[k] - ma) * (b[k] - mb);
  }
  va /= n;
  vb /= n;
  cov /= n;
  double num = (2 * ma * mb + c1) * (2 * cov + c2);
  double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
  if (den == 0.0) return 1.0;  // both maps identically zero
  return num / den;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s;
    while (e + 1 < order.size() && v[order[e + 1]] == v[order[s]]) ++e;
    double avg = 0.5 * static_cast<double>(s + e) + 1.0;
    for (std::size_t k = s; k <= e; ++k) ranks[order[k]] = avg;
    s = e + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  auto ra = average_ranks(a), rb = average_ranks(b);
  return pearson(ra, rb);
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      bool ta = a[i] == a[j], tb = b[i] == b[j];
      if (ta && tb) continue;
      if (ta) {
        ++ties_a;
      } else if (tb) {
        ++ties_b;
      } else if ((a[i] < a[j]) == (b[i] < b[j])) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  double n1 = static_cast<double>(concordant + discordant + ties_a);
  double n2 = static_cast<double>(concordant + discordant + ties_b);
  if (n1 == 0.0 || n2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

EvalStats eval_stats(std::span<const double> pred_cell, std::span<const double> label_cell, const GridMap &pred_map,
                     const GridMap &label_map) {
  check_lengths(pred_cell, label_cell);
  if (pred_map.n != label_map.n || pred_map.m != label_map.m) throw std::invalid_argument("grid maps differ in shape");
  EvalStats s;
  s.nrmse = nrmse(pred_cell, label_cell, &s.nrmse_infinite);
  s.ssim = ssim_global(pred_map.v, label_map.v);
  s.pearson = pearson(pred_cell, label_cell);
  s.spearman = spearman(pred_cell, label_cell);
  s.kendall = kendall_tau(pred_cell, label_cell);
  return s;
}

}  // namespace routeplace
