#include "tsgresp/regress.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "summation.hpp"
#include "tsgresp/error.hpp"

namespace tsg {

namespace {

void require_pairs(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        fail(ErrorCode::shape_mismatch, std::string(what) + ": length mismatch (" +
                                            std::to_string(a) + " vs " + std::to_string(b) + ")");
    require(a >= 3, std::string(what) + ": needs at least 3 points");
}

double mean_of(std::span<const double> xs) {
    return detail::compensated_sum(xs) / static_cast<double>(xs.size());
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h;
    }
    fail(ErrorCode::numerical, "incomplete beta continued fraction did not converge");
}

}  // namespace

LinearFit ols_fit(std::span<const double> y, std::span<const double> z) {
    require_pairs(y.size(), z.size(), "ols_fit");
    const double ybar = mean_of(y);
    const double zbar = mean_of(z);
    detail::CompensatedSum sxy, szz;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dz = z[i] - zbar;
        sxy.add((y[i] - ybar) * dz);
        szz.add(dz * dz);
    }
    if (!(szz.value() > 0.0))
        fail(ErrorCode::degenerate,
             "regressor has zero variance (collapsed embedding); slope is undefined");
    LinearFit fit;
    fit.slope = sxy.value() / szz.value();
    fit.intercept = ybar - fit.slope * zbar;
    fit.count = y.size();
    return fit;
}

double predict(const LinearFit& fit, double z) { return fit.intercept + fit.slope * z; }

std::vector<double> predict(const LinearFit& fit, std::span<const double> z) {
    std::vector<double> out;
    out.reserve(z.size());
    for (double v : z)
        out.push_back(predict(fit, v));
    return out;
}

FStatistic f_statistic(std::span<const double> y, std::span<const double> y_hat) {
    require_pairs(y.size(), y_hat.size(), "f_statistic");
    const double ybar = mean_of(y);
    detail::CompensatedSum explained, residual;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double e = y_hat[k] - ybar;
        const double r = y[k] - y_hat[k];
        explained.add(e * e);
        residual.add(r * r);
    }
    if (!(residual.value() > 0.0))
        return {std::numeric_limits<double>::infinity(), true};
    return {static_cast<double>(y.size() - 2) * explained.value() / residual.value(), false};
}

double incomplete_beta(double a, double b, double x) {
    require(a > 0.0 && b > 0.0, "incomplete_beta: shape parameters must be positive");
    require(x >= 0.0 && x <= 1.0, "incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
    require(d1 > 0.0 && d2 > 0.0, "f_cdf: degrees of freedom must be positive");
    if (std::isnan(x))
        fail(ErrorCode::invalid_argument, "f_cdf: x is NaN");
    if (x <= 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    const double w = d1 * x / (d1 * x + d2);
    return incomplete_beta(0.5 * d1, 0.5 * d2, w);
}

double f_quantile(double p, double d1, double d2) {
    require(p > 0.0 && p < 1.0, "f_quantile: p must lie in (0, 1)");
    require(d1 > 0.0 && d2 > 0.0, "f_quantile: degrees of freedom must be positive");
    double lo = 0.0;
    double hi = 1.0;
    while (f_cdf(hi, d1, d2) < p) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            fail(ErrorCode::numerical, "f_quantile: could not bracket the quantile");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (f_cdf(mid, d1, d2) < p)
            lo = mid;
        else
            hi = mid;
    }
    return std::abs(f_cdf(lo, d1, d2) - p) < std::abs(f_cdf(hi, d1, d2) - p) ? lo : hi;
}

FTestReport f_test(std::span<const double> y, std::span<const double> y_hat, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "f_test: significance level must lie in (0, 1)");
    const FStatistic f = f_statistic(y, y_hat);
    FTestReport r;
    r.statistic = f.value;
    r.perfect_fit = f.perfect_fit;
    r.df1 = 1;
    r.df2 = y.size() - 2;
    const auto df2 = static_cast<double>(r.df2);
    r.critical_value = f_quantile(1.0 - alpha, 1.0, df2);
    // Upper tail through the complementary beta argument keeps small p-values accurate.
    r.p_value = f.perfect_fit ? 0.0
                : f.value <= 0.0
                    ? 1.0
                    : incomplete_beta(0.5 * df2, 0.5, df2 / (df2 + f.value));
    r.reject = r.statistic > r.critical_value;
    return r;
}

double rejection_rate(std::span<const FTestReport> reports) {
    if (reports.empty())
        return 0.0;
    std::size_t hits = 0;
    for (const auto& r : reports)
        hits += r.reject ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(reports.size());
}

}  // namespace tsg
