#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gazedepth::stats {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> xs);

// Quantile by linear interpolation between order statistics: position
// h = (n - 1) * q on the sorted sample.
double quantile(std::span<const double> xs, double q);
double median(std::span<const double> xs);

struct BoxPlot {
  std::size_t n{0};
  double q1{0}, median{0}, q3{0};
  double whisker_low{0}, whisker_high{0};  // most extreme data within 1.5 IQR of the box
  std::vector<double> outliers;            // ascending
};

BoxPlot box_plot(std::span<const double> xs);

struct Bin {
  double lo{0}, hi{0};
  std::size_t count{0};
};

// Equal-width bins over [lo, hi); values outside are dropped.
std::vector<Bin> histogram(std::span<const double> xs, double lo, double hi, std::size_t bins);

// Sign changes of (x - level) between consecutive values.
std::size_t level_crossings(std::span<const double> xs, double level);

}  // namespace gazedepth::stats
