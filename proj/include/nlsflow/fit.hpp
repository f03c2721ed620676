#pragma once

#include <span>

namespace nlsflow {

// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// y = prefactor x^exponent, fitted in log-log space. max_relative_residual is
// max |y_i / fit(x_i) - 1| over the data.
struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double max_relative_residual = 0.0;
};

PowerFit power_fit(std::span<const double> x, std::span<const double> y);

// One-parameter fit y = a g(x), least squares in the relative residual;
// returns a and the largest |a g_i / y_i - 1|.
struct ScaleFit {
  double scale = 0.0;
  double max_relative_residual = 0.0;
};

ScaleFit scale_fit(std::span<const double> g, std::span<const double> y);

}  // namespace nlsflow
