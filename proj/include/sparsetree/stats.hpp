#pragma once

#include <cstddef>
#include <span>

namespace sparsetree {

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// One-pass mean/variance (Welford). The mean is reported from a compensated sum.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const;
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  /// Sample standard deviation over sqrt(count).
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  CompensatedSum sum_;
  double welford_mean_ = 0.0;
  double m2_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x. r_squared is 0 when y has no spread.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace sparsetree
