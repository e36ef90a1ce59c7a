#pragma once

#include <cmath>
#include <numbers>

namespace edgelab {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

inline double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace edgelab
