#pragma once

#include <cstddef>
#include <span>

namespace rwre {

/// Default normal quantile for reported confidence half-widths.
inline constexpr double kDefaultZ = 3.0;

/// Welford accumulator. Fed in a fixed (replicate) order it is bit-stable,
/// and a constant stream yields that constant exactly.
class RunningStats {
 public:
  void push(double x) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// value +- half_width, half_width = z * standard error.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;

  double lower() const noexcept { return value - half_width; }
  double upper() const noexcept { return value + half_width; }
};

Estimate mean_estimate(std::span<const double> samples, double z = kDefaultZ);

/// Ratio of means with a delta-method half-width.
struct RatioEstimate {
  double ratio = 0.0;
  double half_width = 0.0;
  double num_mean = 0.0;
  double den_mean = 0.0;
  std::size_t n = 0;
  /// Denominator mean within its own confidence band of zero; ratio is NaN.
  bool degenerate = false;

  double lower() const noexcept { return ratio - half_width; }
  double upper() const noexcept { return ratio + half_width; }
};

RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den,
                             double z = kDefaultZ);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace rwre
