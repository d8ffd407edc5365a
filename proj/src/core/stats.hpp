#pragma once

#include <vector>

namespace gfd {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double residual_rms = 0.0;
  double ci_lo = 0.0;  // 95% two-sided interval for the slope
  double ci_hi = 0.0;
  int points = 0;
};

// Ordinary least squares y = intercept + slope*x with a Student-t interval on the slope.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gfd
