#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "weakiv/dataset.hpp"

namespace weakiv {

enum class Method { Jar, Rjar, Bcch, BcchAsy, Fisher };

const char* method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

/// Component diagnostics carried alongside a TestResult.
struct TestDetail {
    std::optional<double> p_jar;         // Fisher: quadratic component p-value
    std::optional<double> p_max;         // Fisher: max component p-value
    std::optional<double> jar_value;     // Fisher: quadratic statistic
    std::optional<double> max_sq_value;  // Fisher: squared max statistic
    bool conservative_p_value = false;   // BCCH: Bonferroni companion p-value
};

struct TestResult {
    Method method = Method::Jar;
    double statistic = 0.0;
    double p_value = 1.0;
    double critical_value = 0.0;
    bool reject = false;
    double alpha = 0.05;
    TestDetail detail;
};

struct MaxStatistic {
    double value = 0.0;              // max_k |S_k / sigma_k| over usable columns
    Eigen::VectorXd per_instrument;  // |S_k / sigma_k|, NaN marks degenerate columns
};

// ---------------------------------------------------------------------------
// Statistics on null residuals e_i = y_i - x_i * beta0
// ---------------------------------------------------------------------------

/// Quadratic statistic: sum_{i != j} e_i e_j Z_i'Z_j over
/// sqrt(2 sum_{i != j} e_i^2 e_j^2 (Z_i'Z_j)^2), computed through Gram
/// identities rather than the literal double sum. Throws ZeroDenominatorError
/// when the variance term vanishes.
double jar_statistic(const Dataset& data, const Residuals& res);

/// Ridge-projected variant with projection kernel Z (Z'Z + gamma I)^{-1} Z'.
/// The rank normalization cancels between numerator and variance, so only the
/// ratio is computed. Throws SingularMatrixError when gamma == 0 and Z'Z is
/// singular, ZeroDenominatorError as for jar_statistic.
double rjar_statistic(const Dataset& data, const Residuals& res, double gamma);

/// Max of |S_k / sigma_k| with S_k = n^{-1/2} sum_i e_i Z_ik and
/// sigma_k^2 = n^{-1} sum_i e_i^2 Z_ik^2. Columns with sigma_k == 0 are
/// skipped (their S_k is exactly zero); throws AllDegenerateError when every
/// column is skipped.
MaxStatistic max_statistic(const Dataset& data, const Residuals& res);

/// Variance estimator 2 (n-1)^{-2} sum_{i != j} e_i^2 e_j^2 (Z_i'Z_j)^2.
/// Equals the squared jar denominator divided by (n-1)^2; returns 0 for
/// all-zero residuals rather than throwing.
double omega_hat(const Dataset& data, const Residuals& res);

// ---------------------------------------------------------------------------
// Decision rules
// ---------------------------------------------------------------------------

/// Bonferroni-style rule: rejects iff max_stat > 1.1 * z(alpha / 2K). The
/// reported p-value min(1, 2K (1 - Phi(max_stat/1.1))) is a conservative
/// companion, flagged as such in the detail record.
TestResult bcch_decision(double max_stat, Eigen::Index num_instruments, double alpha);

/// Refined rule from the Gumbel limit of the squared max statistic: rejects
/// iff max_stat^2 >= 2 log K - log log K + gumbel_upper_quantile(alpha).
/// Requires K >= 2 (throws KTooSmallError otherwise).
TestResult bcch_asy_decision(double max_stat, Eigen::Index num_instruments, double alpha);

/// Fisher combination -2 log p_jar - 2 log p_max; inputs are clamped to
/// [kMinPValue, 1] first.
double fisher_statistic(double p_jar, double p_max);

/// One-sided normal-tail decision shared by the quadratic statistics:
/// rejects iff statistic >= z(alpha), p-value 1 - Phi(statistic).
TestResult normal_tail_decision(Method method, double statistic, double alpha);

/// Combined decision from precomputed component statistics; compares the
/// Fisher statistic against the chi-square(4) upper quantile.
TestResult fisher_decision(double jar_value, double max_value, Eigen::Index num_instruments,
                           double alpha);

/// Computes residuals at beta0, the requested statistic, its p-value, and the
/// decision at level alpha. gamma is required iff method == Rjar. A degenerate
/// component inside Fisher fails the whole call with a message naming the
/// component.
TestResult run_test(const Dataset& data, double beta0, Method method, double alpha,
                    std::optional<double> gamma = std::nullopt);

/// Asymptotic local power diagnostic
/// Phi(-z(alpha) + n * zeta' Sigma_Z^2 zeta / sqrt(omega)).
double theoretical_local_power(const Eigen::VectorXd& zeta, const Eigen::MatrixXd& sigma_z,
                               double omega, Eigen::Index n, double alpha);

}  // namespace weakiv
