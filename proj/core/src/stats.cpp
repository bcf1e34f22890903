#include "rwre/stats.hpp"

#include <cmath>
#include <limits>

#include "rwre/errors.hpp"

namespace rwre {

void RunningStats::push(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const noexcept {
  return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double RunningStats::std_error() const noexcept {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

Estimate mean_estimate(std::span<const double> samples, double z) {
  if (samples.empty()) throw EstimationError("mean of an empty sample");
  RunningStats s;
  for (double x : samples) s.push(x);
  return {s.mean(), z * s.std_error(), s.count()};
}

RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den, double z) {
  if (num.size() != den.size() || num.empty())
    throw EstimationError("ratio estimate needs paired, non-empty samples");
  RunningStats sn, sd;
  for (std::size_t i = 0; i < num.size(); ++i) {
    sn.push(num[i]);
    sd.push(den[i]);
  }
  const auto n = static_cast<double>(num.size());
  RatioEstimate out;
  out.n = num.size();
  out.num_mean = sn.mean();
  out.den_mean = sd.mean();
  if (out.den_mean <= 0.0 || out.den_mean <= z * sd.std_error()) {
    out.degenerate = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.half_width = std::numeric_limits<double>::infinity();
    return out;
  }
  out.ratio = out.num_mean / out.den_mean;
  // Residual form of the delta method: var(num - R den) / n / den_mean^2.
  RunningStats resid;
  for (std::size_t i = 0; i < num.size(); ++i) resid.push(num[i] - out.ratio * den[i]);
  out.half_width = z * std::sqrt(resid.variance() / n) / out.den_mean;
  return out;
}

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace rwre
