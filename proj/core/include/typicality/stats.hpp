#pragma once

#include <span>

namespace typicality::stats {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// log N(x; mean, variance)
double gaussian_log_density(double x, double mean, double variance);

double mean(std::span<const double> values);

/// Unbiased (n-1) variance. Requires at least two values.
double sample_variance(std::span<const double> values);

/// Unbiased variance floored at kVarianceFloor; a single value yields the floor.
double floored_variance(std::span<const double> values);

/// log(sum(exp(values))) with max shift. Empty input gives -inf.
double log_sum_exp(std::span<const double> values);

}  // namespace typicality::stats
