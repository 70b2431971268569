#include "ssblab/stats.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "ssblab/core.hpp"

namespace ssblab::stats {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("linear_fit: need at least two paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("linear_fit: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

LinearFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ValidationError("log_log_fit: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

ChiSquare chi_square_uniform(std::span<const double> counts) {
  if (counts.size() < 2) throw ValidationError("chi_square_uniform: need >= 2 bins");
  double total = 0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) throw ValidationError("chi_square_uniform: empty histogram");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquare out;
  for (double c : counts) out.statistic += (c - expected) * (c - expected) / expected;
  out.dof = static_cast<int>(counts.size()) - 1;
  boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double angle_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

std::vector<double> histogram_angles(std::span<const double> angles, int bins) {
  if (bins < 1) throw ValidationError("histogram_angles: need >= 1 bin");
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  for (double a : angles) {
    auto b = static_cast<int>(wrap_angle(a) / kTwoPi * bins);
    h[static_cast<std::size_t>(std::min(b, bins - 1))] += 1.0;
  }
  return h;
}

CircularSummary circular_summary(std::span<const double> angles) {
  if (angles.empty()) throw ValidationError("circular_summary: no angles");
  std::complex<double> s1 = 0, s2 = 0;
  for (double a : angles) {
    s1 += std::polar(1.0, a);
    s2 += std::polar(1.0, 2 * a);
  }
  const auto n = static_cast<double>(angles.size());
  CircularSummary out;
  out.resultant_length = std::abs(s1) / n;
  out.mean_direction = wrap_angle(std::arg(s1));
  const double r2 = std::abs(s2) / n;
  out.standard_error =
      out.resultant_length > 0
          ? std::sqrt(std::max(0.0, 1.0 - r2) / (2.0 * n)) / out.resultant_length
          : std::numeric_limits<double>::infinity();
  return out;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw ValidationError("mean: empty sample");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const auto n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace ssblab::stats
