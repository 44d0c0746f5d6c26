#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ruinlab {

// Compensated (Neumaier) summation.
class NeumaierSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

// Wilson score interval for k successes out of n trials. Always contains k/n.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = kZ95);

struct SampleMean {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

// Mean and standard error (sample sd / sqrt(n)), summed in index order.
SampleMean sample_mean(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
// Asymptotic critical value c(level) sqrt((n + m) / (n m)).
double ks_critical_value(std::size_t n, std::size_t m, double level);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_err = 0.0;
};

// Ordinary least squares of y on x; needs at least two distinct x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ruinlab
