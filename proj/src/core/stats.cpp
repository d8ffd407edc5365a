#include "core/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "core/error.hpp"

namespace gfd {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(Errc::degenerate, "regression needs at least two points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) fail(Errc::degenerate, "regression abscissae are all equal");
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.residual_rms = std::sqrt(sse / n);
  if (n > 2) {
    f.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.ci_lo = f.slope - t * f.slope_stderr;
    f.ci_hi = f.slope + t * f.slope_stderr;
  } else {
    f.ci_lo = -INFINITY;
    f.ci_hi = INFINITY;
  }
  return f;
}

}  // namespace gfd
