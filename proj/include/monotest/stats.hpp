#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace monotest {

/// Type-7 (linear interpolation between order statistics) sample quantile.
/// Copies the data; p in [0, 1].
[[nodiscard]] double quantile_type7(std::span<const double> data, double p);

/// Same, on data already sorted ascending.
[[nodiscard]] double quantile_type7_sorted(std::span<const double> sorted, double p);

/// Bootstrap standard error of the type-7 p-quantile (resampling with
/// replacement from a seeded stream).
[[nodiscard]] double bootstrap_quantile_stderr(std::span<const double> data, double p, int resamples,
                                               std::uint64_t seed);

/// Number of entries >= x in ascending-sorted data.
[[nodiscard]] std::size_t count_at_least(std::span<const double> sorted, double x);

[[nodiscard]] double mean(std::span<const double> data);
[[nodiscard]] double sample_variance(std::span<const double> data);

}  // namespace monotest
