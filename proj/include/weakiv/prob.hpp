#pragma once

namespace weakiv::prob {

// Floor applied to p-values before taking logarithms; keeps the Fisher
// combination finite without changing any rejection decision.
inline constexpr double kMinPValue = 1e-300;

/// Standard normal CDF, computed through erfc so both tails stay accurate.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x) without cancellation for large x.
double normal_sf(double x);

/// z such that normal_cdf(z) = 1 - alpha, for alpha in (0,1).
double normal_upper_quantile(double alpha);

/// CDF of the Gumbel-type law G(x) = exp(-exp(-x/2)/sqrt(pi)).
double gumbel_cdf(double x);

/// 1 - gumbel_cdf(x), via expm1 so small upper-tail values keep precision.
double gumbel_sf(double x);

/// Closed form -log(pi) - 2 log(log(1/(1-alpha))); gumbel_cdf of the result
/// is 1 - alpha.
double gumbel_upper_quantile(double alpha);

/// Chi-square with 4 degrees of freedom: CDF 1 - (1 + x/2) exp(-x/2) on x >= 0.
double chi2_4_cdf(double x);
double chi2_4_sf(double x);
double chi2_4_upper_quantile(double alpha);

/// Clamps a p-value into [kMinPValue, 1].
double clamp_pvalue(double p);

}  // namespace weakiv::prob
