#pragma once

#include <vector>

namespace gaplab::stats {

double mean(const std::vector<double>& xs);

/// Sample standard deviation (n-1 denominator). 0 for n < 2.
double sample_std(const std::vector<double>& xs);

/// Half-width of the 95% confidence interval of the mean, normal
/// approximation: 1.96 * stderr. 0 for n < 2.
double ci95_halfwidth(const std::vector<double>& xs);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t with (possibly fractional) df.
double student_t_two_sided_p(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Welch's unequal-variance t-test on two samples.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gaplab::stats
