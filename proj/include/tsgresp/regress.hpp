#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsg {

/// y = intercept + slope * z fitted by ordinary least squares on `count` points.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    std::size_t count = 0;
};

/// Needs at least 3 points; throws `degenerate` when every z is equal.
LinearFit ols_fit(std::span<const double> y, std::span<const double> z);

double predict(const LinearFit& fit, double z);
std::vector<double> predict(const LinearFit& fit, std::span<const double> z);

struct FStatistic {
    double value = 0.0;       // +infinity when the residual sum is zero
    bool perfect_fit = false;
};

/// (s - 2) * sum (yhat_k - ybar)^2 / sum (y_k - yhat_k)^2.
FStatistic f_statistic(std::span<const double> y, std::span<const double> y_hat);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double f_cdf(double x, double d1, double d2);
/// Inverse of f_cdf in x; p must lie in (0, 1).
double f_quantile(double p, double d1, double d2);

struct FTestReport {
    double statistic = 0.0;
    std::size_t df1 = 1;
    std::size_t df2 = 0;
    double critical_value = 0.0;  // (1 - alpha) quantile of F(1, s - 2)
    double p_value = 1.0;
    bool reject = false;          // statistic > critical_value
    bool perfect_fit = false;
};

/// F-test of a zero slope for a simple linear fit, level alpha in (0, 1).
FTestReport f_test(std::span<const double> y, std::span<const double> y_hat, double alpha);

/// Fraction of reports that reject.
double rejection_rate(std::span<const FTestReport> reports);

}  // namespace tsg
