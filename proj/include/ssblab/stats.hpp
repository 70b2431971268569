#pragma once

#include <span>
#include <vector>

namespace ssblab::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // zero when fewer than three points
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x; the slope is the power-law exponent.
LinearFit log_log_fit(std::span<const double> x, std::span<const double> y);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;  // upper tail
};

/// Pearson test of counts against equal expected frequencies.
ChiSquare chi_square_uniform(std::span<const double> counts);

/// Bins angles (radians, any range) into `bins` equal sectors of [0, 2 pi).
std::vector<double> histogram_angles(std::span<const double> angles, int bins);

/// Wraps into [0, 2 pi).
double wrap_angle(double a);
/// Signed difference wrapped into (-pi, pi].
double angle_difference(double a, double b);

struct CircularSummary {
  double mean_direction = 0.0;   // in [0, 2 pi)
  double resultant_length = 0.0; // |mean e^{i a}|
  double standard_error = 0.0;   // of the mean direction
};

/// Mean direction with the large-sample standard error
/// sqrt((1 - R2) / (2 n R^2)), R2 the resultant length of doubled angles.
CircularSummary circular_summary(std::span<const double> angles);

double mean(std::span<const double> v);
double standard_error(std::span<const double> v);

}  // namespace ssblab::stats
