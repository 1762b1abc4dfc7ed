#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "weakiv/statistics.hpp"

namespace weakiv {

enum class SparsityKind { Sparse, Dense };

const char* sparsity_name(SparsityKind kind);

/// First-stage support: the leading q instruments carry equal nonzero
/// coefficients, the rest are irrelevant.
struct Sparsity {
    SparsityKind kind = SparsityKind::Sparse;
    int q = 1;
};

/// Data-generating process: AR(1)-correlated Gaussian instruments,
/// heteroskedasticity controlled by a0, and a first stage Pi = tau * psi with
/// tau calibrated to hit the concentration parameter mu2.
struct DGPConfig {
    int n = 200;
    int num_instruments = 100;
    double rho = 0.6;
    double mu2 = 30.0;
    Sparsity sparsity{SparsityKind::Sparse, 3};
    double a0 = 0.0;
    double sigma_eps2 = 2.0;
    double sigma_v2 = 1.0;
    double eta_corr = 0.6;
    double beta = 1.0;
    double beta0 = 1.0;

    void validate() const;
};

/// One Monte Carlo cell: a DGP plus the replication budget, level, seed, and
/// the set of tests to run (gamma feeds the ridge baseline rows).
struct MCConfig {
    DGPConfig dgp;
    int replications = 300;
    double alpha = 0.05;
    std::uint64_t master_seed = 0;
    std::vector<Method> methods{Method::Jar, Method::Rjar, Method::Bcch, Method::BcchAsy,
                                Method::Fisher};
    double gamma = 1.0;

    void validate() const;
};

struct RejectionRow {
    DGPConfig dgp;
    Method method = Method::Jar;
    double alpha = 0.05;
    double gamma = 1.0;
    int replications = 0;
    long rejections = 0;
    long degenerate = 0;  // replications where the statistic was undefined
    double frequency = 0.0;
    double mc_standard_error = 0.0;
};

struct RejectionTable {
    std::vector<RejectionRow> rows;
};

/// tau = sqrt(sigma_v2 * mu2 / (n * psi' Sigma psi)); with Pi = tau * psi the
/// identity mu2 = n Pi' Sigma Pi / sigma_v2 holds exactly.
double calibrate_tau(const Eigen::VectorXd& psi, const Eigen::MatrixXd& sigma_z, double mu2, int n,
                     double sigma_v2);

/// Toeplitz matrix with entries rho^|l-m|; requires |rho| < 1.
Eigen::MatrixXd ar1_covariance(int num_instruments, double rho);

/// psi = (1_q, 0_{K-q}).
Eigen::VectorXd sparsity_direction(const Sparsity& sparsity, int num_instruments);

/// Draws one dataset. Deterministic given (dgp, seed): per observation the
/// stream yields K instrument normals (AR(1) recursion, the closed-form
/// Cholesky transport of the Toeplitz covariance), the correlated error pair
/// (eta1, eta2), and the heteroskedasticity multiplier draw, in that order.
Dataset generate(const DGPConfig& dgp, std::uint64_t seed);

/// Runs cfg.replications independent datasets, applies every requested method
/// at dgp.beta0, and tallies rejections. Replication r uses seed
/// derive_stream_seed(master_seed, r); output is identical for any thread
/// count. Degenerate statistics count as non-rejections and are reported in
/// the degenerate column.
RejectionTable run_monte_carlo(const MCConfig& cfg, int threads = 1);

enum class ExampleId { E1_1, E1_2, E2_1, E2_2, E3_1, E3_2, E4_1, E4_2 };

const char* example_name(ExampleId id);
std::optional<ExampleId> example_from_name(std::string_view name);
std::vector<ExampleId> all_examples();

struct SuiteOverrides {
    std::optional<int> replications;
    std::optional<double> alpha;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::vector<Method>> methods;
    std::optional<double> gamma;
};

/// Expands one example block into its factorial design. E1-E3 pair
/// (n,K) = (200, 100/200/300) with a0 = 0 (x.1) or 0.5 (x.2) and sweep
/// mu2 in {30,180} x {sparse ceil(0.03K), dense ceil(0.6K)} x
/// beta in {-1,0,1,2,3} at beta0 = 1. E4.1 sweeps K in {100,200,300} x
/// q in {1,3,5,7,9} x beta in {-1,3}; E4.2 replaces the q list with dense
/// fractions {0.2,...,1.0} of K. Both E4 variants fix mu2 = 30, a0 = 0.
std::vector<MCConfig> example_suite(ExampleId id, const SuiteOverrides& overrides = {});

struct TimingRow {
    int num_instruments = 0;
    SparsityKind sparsity = SparsityKind::Sparse;
    Method method = Method::Jar;
    double mean_seconds = 0.0;
};

/// Wall-clock means of the ridge statistic (explicit solve at gamma = 1) and
/// the plain quadratic statistic on freshly generated datasets
/// (n = 200, mu2 = 30, a0 = 0), per K and sparsity.
std::vector<TimingRow> timing_benchmark(const std::vector<int>& k_list, int reps);

struct CriticalValueRow {
    int num_instruments = 0;
    double bcch_threshold = 0.0;     // 1.1 * z(alpha / 2K)
    double refined_threshold = 0.0;  // sqrt(2 log K - log log K + q_alpha)
};

std::vector<CriticalValueRow> critical_value_curve(const std::vector<int>& k_list, double alpha);

}  // namespace weakiv
