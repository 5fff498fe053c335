#pragma once

#include <span>
#include <vector>

#include "socs/types.hpp"

namespace socs {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int n = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit ols_line(std::span<const double> x, std::span<const double> y);

/// Slope of log(y) against log(x); requires positive data.
LineFit ols_loglog(std::span<const double> x, std::span<const double> y);

} // namespace socs
