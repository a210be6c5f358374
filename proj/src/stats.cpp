#include "gazedepth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazedepth::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0;
  const double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double quantile(std::span<const double> xs, double q) {
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("quantile must be in [0, 1]");
  return sorted_quantile(sorted_copy(xs), q);
}

double median(std::span<const double> xs) { return quantile(xs, 0.5); }

BoxPlot box_plot(std::span<const double> xs) {
  const auto v = sorted_copy(xs);
  BoxPlot b;
  b.n = v.size();
  b.q1 = sorted_quantile(v, 0.25);
  b.median = sorted_quantile(v, 0.5);
  b.q3 = sorted_quantile(v, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    b.whisker_low = std::min(b.whisker_low, x);
    b.whisker_high = std::max(b.whisker_high, x);
  }
  return b;
}

std::vector<Bin> histogram(std::span<const double> xs, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram: need bins > 0 and hi > lo");
  std::vector<Bin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = lo + width * static_cast<double>(i);
    out[i].hi = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
  }
  for (double x : xs) {
    if (!(x >= lo && x < hi)) continue;
    auto i = static_cast<std::size_t>((x - lo) / width);
    if (i >= bins) i = bins - 1;
    ++out[i].count;
  }
  return out;
}

std::size_t level_crossings(std::span<const double> xs, double level) {
  std::size_t n = 0;
  int prev = 0;
  for (double x : xs) {
    const int side = x > level ? 1 : (x < level ? -1 : 0);
    if (side == 0) continue;
    if (prev != 0 && side != prev) ++n;
    prev = side;
  }
  return n;
}

}  // namespace gazedepth::stats
