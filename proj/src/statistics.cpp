#include "weakiv/statistics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "weakiv/prob.hpp"

namespace weakiv {

namespace {

struct PairSums {
    double numerator = 0.0;  // sum_{i != j} e_i e_j Z_i'Z_j
    double cross_sq = 0.0;   // sum_{i != j} e_i^2 e_j^2 (Z_i'Z_j)^2
};

// Off-diagonal pair sums through Gram identities. With W = diag(e) Z,
//   numerator = ||Z'e||^2 - sum_i e_i^2 ||Z_i||^2
//   cross_sq  = ||W W'||_F^2 - sum_i e_i^4 ||Z_i||^4
// and tr(W W' W W') = tr(W'W W'W), so the Frobenius term is taken on the
// smaller of the n x n and K x K Gram matrices.
PairSums pair_sums(const Eigen::MatrixXd& z, const Eigen::VectorXd& e) {
    const Eigen::Index n = z.rows();
    const Eigen::Index k = z.cols();

    const Eigen::MatrixXd w = e.asDiagonal() * z;
    double diag2 = 0.0;  // sum_i e_i^2 ||Z_i||^2
    double diag4 = 0.0;  // sum_i (e_i^2 ||Z_i||^2)^2
    for (Eigen::Index i = 0; i < n; ++i) {
        const double c = w.row(i).squaredNorm();
        diag2 += c;
        diag4 += c * c;
    }

    double frob2;
    if (n <= k) {
        frob2 = (w * w.transpose()).squaredNorm();
    } else {
        frob2 = (w.transpose() * w).squaredNorm();
    }

    PairSums out;
    out.numerator = (z.transpose() * e).squaredNorm() - diag2;
    out.cross_sq = frob2 - diag4;
    return out;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie strictly in (0,1)");
    }
}

void check_residuals(const Dataset& data, const Residuals& res) {
    data.validate();
    if (res.e.size() != data.n()) {
        throw InvalidInput("residual vector length does not match dataset");
    }
}

double gumbel_centering(Eigen::Index num_instruments) {
    const double log_k = std::log(static_cast<double>(num_instruments));
    return 2.0 * log_k - std::log(log_k);
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::Jar: return "JAR";
        case Method::Rjar: return "RJAR";
        case Method::Bcch: return "BCCH";
        case Method::BcchAsy: return "BCCH_ASY";
        case Method::Fisher: return "FISHER";
    }
    return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
    std::string up;
    up.reserve(name.size());
    for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (up == "JAR") return Method::Jar;
    if (up == "RJAR") return Method::Rjar;
    if (up == "BCCH") return Method::Bcch;
    if (up == "BCCH_ASY" || up == "BCCHASY" || up == "BCCH-ASY") return Method::BcchAsy;
    if (up == "FISHER") return Method::Fisher;
    return std::nullopt;
}

double jar_statistic(const Dataset& data, const Residuals& res) {
    check_residuals(data, res);
    const PairSums s = pair_sums(data.z, res.e);
    const double denom = 2.0 * s.cross_sq;
    if (!(denom > 0.0)) {
        throw ZeroDenominatorError("JAR denominator is zero: statistic undefined at this beta0");
    }
    return s.numerator / std::sqrt(denom);
}

double omega_hat(const Dataset& data, const Residuals& res) {
    check_residuals(data, res);
    const PairSums s = pair_sums(data.z, res.e);
    const double n1 = static_cast<double>(data.n() - 1);
    return std::max(0.0, 2.0 * s.cross_sq) / (n1 * n1);
}

double rjar_statistic(const Dataset& data, const Residuals& res, double gamma) {
    check_residuals(data, res);
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw InvalidInput("gamma must be finite and nonnegative");
    }
    const Eigen::Index n = data.n();
    const Eigen::Index k = data.num_instruments();
    const Eigen::MatrixXd& z = data.z;

    Eigen::MatrixXd proj;  // Z (Z'Z + gamma I)^{-1} Z'
    if (gamma == 0.0) {
        Eigen::MatrixXd ztz = z.transpose() * z;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(ztz);
        if (!lu.isInvertible()) {
            throw SingularMatrixError("Z'Z is singular and gamma = 0");
        }
        proj = z * lu.solve(z.transpose());
    } else if (k <= n) {
        Eigen::MatrixXd a = z.transpose() * z;
        a.diagonal().array() += gamma;
        proj = z * a.ldlt().solve(z.transpose());
    } else {
        // Push-through identity: Z (Z'Z + gI_K)^{-1} Z' = (Z Z' + gI_n)^{-1} Z Z'.
        Eigen::MatrixXd zzt = z * z.transpose();
        Eigen::MatrixXd a = zzt;
        a.diagonal().array() += gamma;
        proj = a.ldlt().solve(zzt);
    }

    const Eigen::VectorXd& e = res.e;
    const Eigen::MatrixXd q = e.asDiagonal() * proj * e.asDiagonal();
    double num = e.dot(proj * e);
    double diag_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        num -= proj(i, i) * e(i) * e(i);
        diag_sq += q(i, i) * q(i, i);
    }
    const double denom = 2.0 * (q.squaredNorm() - diag_sq);
    if (!(denom > 0.0)) {
        throw ZeroDenominatorError("RJAR denominator is zero: statistic undefined at this beta0");
    }
    return num / std::sqrt(denom);
}

MaxStatistic max_statistic(const Dataset& data, const Residuals& res) {
    check_residuals(data, res);
    const Eigen::Index n = data.n();
    const Eigen::Index k = data.num_instruments();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    const Eigen::VectorXd score = data.z.transpose() * res.e;           // sqrt(n) S_k
    const Eigen::VectorXd e_sq = res.e.array().square();
    const Eigen::VectorXd scale_sq =
        data.z.array().square().matrix().transpose() * e_sq;            // n sigma_k^2

    MaxStatistic out;
    out.per_instrument.resize(k);
    double best = -1.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        if (scale_sq(j) == 0.0) {
            // sigma_k = 0 forces every e_i Z_ik = 0, hence S_k = 0: skip.
            out.per_instrument(j) = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double t = std::abs(score(j) / sqrt_n) / std::sqrt(scale_sq(j) / n);
        out.per_instrument(j) = t;
        best = std::max(best, t);
    }
    if (best < 0.0) {
        throw AllDegenerateError("every instrument column has zero scale: max statistic undefined");
    }
    out.value = best;
    return out;
}

TestResult bcch_decision(double max_stat, Eigen::Index num_instruments, double alpha) {
    if (num_instruments < 1) throw InvalidInput("need at least one instrument");
    check_alpha(alpha);
    if (!std::isfinite(max_stat)) throw InvalidInput("statistic must be finite");

    const double k = static_cast<double>(num_instruments);
    TestResult r;
    r.method = Method::Bcch;
    r.statistic = max_stat;
    r.alpha = alpha;
    r.critical_value = 1.1 * prob::normal_upper_quantile(alpha / (2.0 * k));
    r.p_value = std::min(1.0, 2.0 * k * prob::normal_sf(max_stat / 1.1));
    r.reject = max_stat > r.critical_value;
    r.detail.conservative_p_value = true;
    return r;
}

TestResult bcch_asy_decision(double max_stat, Eigen::Index num_instruments, double alpha) {
    if (num_instruments < 2) {
        throw KTooSmallError("refined max test needs K >= 2");
    }
    check_alpha(alpha);
    if (!std::isfinite(max_stat)) throw InvalidInput("statistic must be finite");

    const double centering = gumbel_centering(num_instruments);
    TestResult r;
    r.method = Method::BcchAsy;
    r.statistic = max_stat * max_stat;
    r.alpha = alpha;
    r.critical_value = centering + prob::gumbel_upper_quantile(alpha);
    r.p_value = prob::gumbel_sf(r.statistic - centering);
    r.reject = r.statistic >= r.critical_value;
    return r;
}

double fisher_statistic(double p_jar, double p_max) {
    if (!std::isfinite(p_jar) || !std::isfinite(p_max) || p_jar < 0.0 || p_jar > 1.0 ||
        p_max < 0.0 || p_max > 1.0) {
        throw InvalidInput("component p-values must lie in [0,1]");
    }
    return -2.0 * (std::log(prob::clamp_pvalue(p_jar)) + std::log(prob::clamp_pvalue(p_max)));
}

TestResult normal_tail_decision(Method method, double statistic, double alpha) {
    check_alpha(alpha);
    if (!std::isfinite(statistic)) throw InvalidInput("statistic must be finite");
    TestResult r;
    r.method = method;
    r.statistic = statistic;
    r.alpha = alpha;
    r.critical_value = prob::normal_upper_quantile(alpha);
    r.p_value = prob::normal_sf(statistic);
    r.reject = statistic >= r.critical_value;
    return r;
}

TestResult fisher_decision(double jar_value, double max_value, Eigen::Index num_instruments,
                           double alpha) {
    if (num_instruments < 2) {
        throw KTooSmallError("Fisher combination needs K >= 2 for the max component p-value");
    }
    check_alpha(alpha);
    const double centering = gumbel_centering(num_instruments);
    const double max_sq = max_value * max_value;
    const double p_jar = prob::normal_sf(jar_value);
    const double p_max = prob::gumbel_sf(max_sq - centering);

    TestResult r;
    r.method = Method::Fisher;
    r.statistic = fisher_statistic(p_jar, p_max);
    r.alpha = alpha;
    r.critical_value = prob::chi2_4_upper_quantile(alpha);
    r.p_value = prob::chi2_4_sf(r.statistic);
    r.reject = r.statistic >= r.critical_value;
    r.detail.p_jar = p_jar;
    r.detail.p_max = p_max;
    r.detail.jar_value = jar_value;
    r.detail.max_sq_value = max_sq;
    return r;
}

TestResult run_test(const Dataset& data, double beta0, Method method, double alpha,
                    std::optional<double> gamma) {
    check_alpha(alpha);
    const Residuals res = residuals(data, beta0);
    switch (method) {
        case Method::Jar:
            return normal_tail_decision(Method::Jar, jar_statistic(data, res), alpha);
        case Method::Rjar: {
            if (!gamma.has_value()) {
                throw InvalidInput("RJAR requires a ridge parameter gamma");
            }
            return normal_tail_decision(Method::Rjar, rjar_statistic(data, res, *gamma), alpha);
        }
        case Method::Bcch:
            return bcch_decision(max_statistic(data, res).value, data.num_instruments(), alpha);
        case Method::BcchAsy:
            return bcch_asy_decision(max_statistic(data, res).value, data.num_instruments(), alpha);
        case Method::Fisher: {
            if (data.num_instruments() < 2) {
                throw KTooSmallError("Fisher combination needs K >= 2");
            }
            double jar_value;
            try {
                jar_value = jar_statistic(data, res);
            } catch (const ZeroDenominatorError& ex) {
                throw ZeroDenominatorError(std::string("FISHER: quadratic component: ") + ex.what());
            }
            MaxStatistic mx;
            try {
                mx = max_statistic(data, res);
            } catch (const AllDegenerateError& ex) {
                throw AllDegenerateError(std::string("FISHER: max component: ") + ex.what());
            }
            return fisher_decision(jar_value, mx.value, data.num_instruments(), alpha);
        }
    }
    throw InvalidInput("unknown method");
}

double theoretical_local_power(const Eigen::VectorXd& zeta, const Eigen::MatrixXd& sigma_z,
                               double omega, Eigen::Index n, double alpha) {
    check_alpha(alpha);
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw InvalidInput("omega must be finite and positive");
    }
    if (n < 1) throw InvalidInput("n must be positive");
    if (sigma_z.rows() != sigma_z.cols() || sigma_z.rows() != zeta.size()) {
        throw InvalidInput("sigma_z must be square with the dimension of zeta");
    }
    if (!zeta.allFinite() || !sigma_z.allFinite()) {
        throw InvalidInput("zeta and sigma_z must be finite");
    }
    if ((sigma_z - sigma_z.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidInput("sigma_z must be symmetric (within 1e-10)");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_z, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw InvalidInput("sigma_z must be positive semidefinite (within -1e-10)");
    }

    const double signal =
        static_cast<double>(n) * (sigma_z * zeta).squaredNorm() / std::sqrt(omega);
    const double shifted = -prob::normal_upper_quantile(alpha) + signal;
    if (shifted > 40.0) return 1.0;  // normal_cdf saturates; avoid erfc overflow paths
    return prob::normal_cdf(shifted);
}

}  // namespace weakiv
