#include "weakiv/prob.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weakiv/errors.hpp"

namespace weakiv::prob {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogPi = 1.14472988584940017414;
constexpr double kInvSqrtPi = 0.56418958354775628695;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
}

void require_open_unit(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput(std::string(what) + " must lie strictly in (0,1)");
    }
}

// Safeguarded bisection for a strictly decreasing survival function.
// Keeps [lo, hi] a bracket of sf(x) = target and stops at double resolution.
template <typename Sf>
double invert_decreasing(Sf sf, double target, double lo, double hi) {
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval is one ulp wide
        if (sf(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double normal_cdf(double x) {
    require_finite(x, "normal_cdf argument");
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_sf(double x) {
    require_finite(x, "normal_sf argument");
    return 0.5 * std::erfc(x * kInvSqrt2);
}

double normal_upper_quantile(double alpha) {
    require_open_unit(alpha, "normal_upper_quantile alpha");
    // Solve normal_sf(z) = alpha. The bracket covers every alpha representable
    // in double precision (normal_sf(39) underflows past 1e-300).
    return invert_decreasing([](double z) { return normal_sf(z); }, alpha, -40.0, 40.0);
}

double gumbel_cdf(double x) {
    require_finite(x, "gumbel_cdf argument");
    return std::exp(-kInvSqrtPi * std::exp(-0.5 * x));
}

double gumbel_sf(double x) {
    require_finite(x, "gumbel_sf argument");
    return -std::expm1(-kInvSqrtPi * std::exp(-0.5 * x));
}

double gumbel_upper_quantile(double alpha) {
    require_open_unit(alpha, "gumbel_upper_quantile alpha");
    // log(1/(1-alpha)) = -log1p(-alpha), accurate for small alpha.
    return -kLogPi - 2.0 * std::log(-std::log1p(-alpha));
}

double chi2_4_cdf(double x) {
    require_finite(x, "chi2_4_cdf argument");
    if (x <= 0.0) return 0.0;
    return 1.0 - chi2_4_sf(x);
}

double chi2_4_sf(double x) {
    require_finite(x, "chi2_4_sf argument");
    if (x <= 0.0) return 1.0;
    return (1.0 + 0.5 * x) * std::exp(-0.5 * x);
}

double chi2_4_upper_quantile(double alpha) {
    require_open_unit(alpha, "chi2_4_upper_quantile alpha");
    double hi = 1.0;
    while (chi2_4_sf(hi) > alpha) hi *= 2.0;
    return invert_decreasing([](double x) { return chi2_4_sf(x); }, alpha, 0.0, hi);
}

double clamp_pvalue(double p) {
    return std::min(1.0, std::max(p, kMinPValue));
}

}  // namespace weakiv::prob
