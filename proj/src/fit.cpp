#include "nlsflow/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlsflow/error.hpp"

namespace nlsflow {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw MetricError("linear fit needs at least two matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw MetricError("linear fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

PowerFit power_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw MetricError("power fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const auto lin = linear_fit(lx, ly);
  PowerFit f{lin.slope, std::exp(lin.intercept), lin.r2, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_relative_residual =
        std::max(f.max_relative_residual, std::abs(y[i] / (f.prefactor * std::pow(x[i], f.exponent)) - 1.0));
  return f;
}

ScaleFit scale_fit(std::span<const double> g, std::span<const double> y) {
  if (g.size() != y.size() || g.empty()) throw MetricError("scale fit needs matching nonempty data");
  // Least squares in the relative residual a g_i / y_i - 1.
  double r = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(y[i] > 0.0)) throw MetricError("scale fit needs positive data");
    r += g[i] / y[i];
    rr += (g[i] / y[i]) * (g[i] / y[i]);
  }
  if (!(rr > 0.0)) throw MetricError("scale fit needs a nonzero model");
  ScaleFit f{r / rr, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i)
    f.max_relative_residual = std::max(f.max_relative_residual, std::abs(f.scale * g[i] / y[i] - 1.0));
  return f;
}

}  // namespace nlsflow
