#include "weakiv/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "weakiv/prob.hpp"
#include "weakiv/rng.hpp"

namespace weakiv {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie strictly in (0,1)");
    }
}

// Integer ceil(num * k / den) without floating-point rounding surprises.
int ceil_fraction(long num, long k, long den) {
    return static_cast<int>((num * k + den - 1) / den);
}

}  // namespace

const char* sparsity_name(SparsityKind kind) {
    return kind == SparsityKind::Sparse ? "sparse" : "dense";
}

void DGPConfig::validate() const {
    if (n < 2) throw InvalidInput("dgp: n must be at least 2");
    if (num_instruments < 1) throw InvalidInput("dgp: K must be at least 1");
    if (!(std::abs(rho) < 1.0)) throw InvalidInput("dgp: |rho| must be < 1");
    if (!(mu2 >= 0.0) || !std::isfinite(mu2)) throw InvalidInput("dgp: mu2 must be nonnegative");
    if (sparsity.q < 1 || sparsity.q > num_instruments) {
        throw InvalidInput("dgp: sparsity q must satisfy 1 <= q <= K");
    }
    if (!std::isfinite(a0)) throw InvalidInput("dgp: a0 must be finite");
    if (!(sigma_eps2 > 0.0)) throw InvalidInput("dgp: sigma_eps2 must be positive");
    if (!(sigma_v2 > 0.0)) throw InvalidInput("dgp: sigma_v2 must be positive");
    if (!(std::abs(eta_corr) < 1.0)) throw InvalidInput("dgp: |eta_corr| must be < 1");
    if (!std::isfinite(beta) || !std::isfinite(beta0)) {
        throw InvalidInput("dgp: beta and beta0 must be finite");
    }
}

void MCConfig::validate() const {
    dgp.validate();
    if (replications < 1) throw InvalidInput("replications must be at least 1");
    check_alpha(alpha);
    if (methods.empty()) throw InvalidInput("at least one method is required");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InvalidInput("gamma must be finite and nonnegative");
    }
}

double calibrate_tau(const Eigen::VectorXd& psi, const Eigen::MatrixXd& sigma_z, double mu2, int n,
                     double sigma_v2) {
    if (sigma_z.rows() != sigma_z.cols() || sigma_z.rows() != psi.size()) {
        throw InvalidInput("sigma_z must be square with the dimension of psi");
    }
    if (n < 1) throw InvalidInput("n must be positive");
    if (!(mu2 >= 0.0)) throw InvalidInput("mu2 must be nonnegative");
    if (!(sigma_v2 > 0.0)) throw InvalidInput("sigma_v2 must be positive");
    if (mu2 == 0.0) return 0.0;
    const double quad = psi.dot(sigma_z * psi);
    if (!(quad > 0.0)) {
        throw DegenerateDirectionError("psi' Sigma psi = 0 while mu2 > 0: tau is undefined");
    }
    return std::sqrt(sigma_v2 * mu2 / (static_cast<double>(n) * quad));
}

Eigen::MatrixXd ar1_covariance(int num_instruments, double rho) {
    if (num_instruments < 1) throw InvalidInput("K must be at least 1");
    if (!(std::abs(rho) < 1.0)) throw InvalidInput("|rho| must be < 1");
    Eigen::MatrixXd s(num_instruments, num_instruments);
    for (int l = 0; l < num_instruments; ++l) {
        s(l, l) = 1.0;
        for (int m = 0; m < l; ++m) {
            const double v = std::pow(rho, l - m);
            s(l, m) = v;
            s(m, l) = v;
        }
    }
    return s;
}

Eigen::VectorXd sparsity_direction(const Sparsity& sparsity, int num_instruments) {
    if (sparsity.q < 1 || sparsity.q > num_instruments) {
        throw InvalidInput("sparsity q must satisfy 1 <= q <= K");
    }
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(num_instruments);
    psi.head(sparsity.q).setOnes();
    return psi;
}

Dataset generate(const DGPConfig& dgp, std::uint64_t seed) {
    dgp.validate();
    const int n = dgp.n;
    const int k = dgp.num_instruments;

    const Eigen::VectorXd psi = sparsity_direction(dgp.sparsity, k);
    const Eigen::MatrixXd sigma = ar1_covariance(k, dgp.rho);
    const double tau = calibrate_tau(psi, sigma, dgp.mu2, n, dgp.sigma_v2);
    const Eigen::VectorXd pi = tau * psi;

    const double sigma_eps = std::sqrt(dgp.sigma_eps2);
    const double sigma_v = std::sqrt(dgp.sigma_v2);
    const double c = dgp.eta_corr;
    const double c_orth = std::sqrt(1.0 - c * c);
    const double ar_scale = std::sqrt(1.0 - dgp.rho * dgp.rho);

    RandomStream rng(seed);
    Dataset out;
    out.y.resize(n);
    out.x.resize(n);
    out.z.resize(n, k);

    for (int i = 0; i < n; ++i) {
        // Stationary AR(1) recursion across components; realizes the
        // lower-triangular factor of the Toeplitz covariance exactly.
        double prev = rng.normal();
        out.z(i, 0) = prev;
        for (int j = 1; j < k; ++j) {
            prev = dgp.rho * prev + ar_scale * rng.normal();
            out.z(i, j) = prev;
        }
        const double a = rng.normal();
        const double b = rng.normal();
        const double eta1 = a;
        const double eta2 = c * a + c_orth * b;
        const double mult = rng.normal();  // heteroskedasticity draw

        const double eps = (sigma_eps + dgp.a0 * out.z(i, 0) * mult) * eta1;
        const double v = sigma_v * eta2;
        out.x(i) = out.z.row(i).dot(pi) + v;
        out.y(i) = out.x(i) * dgp.beta + eps;
    }
    return out;
}

namespace {

struct Tally {
    long rejections = 0;
    long degenerate = 0;
};

bool wants(const std::vector<Method>& methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

// One replication: compute each requested statistic once, then apply every
// decision rule.
void run_replication(const MCConfig& cfg, std::uint64_t seed, bool need_jar, bool need_max,
                     std::vector<Tally>& tallies) {
    const Dataset data = generate(cfg.dgp, seed);
    const Residuals res = residuals(data, cfg.dgp.beta0);
    const Eigen::Index k = data.num_instruments();

    std::optional<double> jar;
    if (need_jar) {
        try {
            jar = jar_statistic(data, res);
        } catch (const StatisticUndefined&) {
        }
    }
    std::optional<double> mx;
    if (need_max) {
        try {
            mx = max_statistic(data, res).value;
        } catch (const StatisticUndefined&) {
        }
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        bool reject = false;
        bool degenerate = false;
        switch (cfg.methods[mi]) {
            case Method::Jar:
                if (jar) {
                    reject = normal_tail_decision(Method::Jar, *jar, cfg.alpha).reject;
                } else {
                    degenerate = true;
                }
                break;
            case Method::Rjar:
                try {
                    const double s = rjar_statistic(data, res, cfg.gamma);
                    reject = normal_tail_decision(Method::Rjar, s, cfg.alpha).reject;
                } catch (const StatisticUndefined&) {
                    degenerate = true;
                }
                break;
            case Method::Bcch:
                if (mx) {
                    reject = bcch_decision(*mx, k, cfg.alpha).reject;
                } else {
                    degenerate = true;
                }
                break;
            case Method::BcchAsy:
                if (mx) {
                    reject = bcch_asy_decision(*mx, k, cfg.alpha).reject;
                } else {
                    degenerate = true;
                }
                break;
            case Method::Fisher:
                if (jar && mx) {
                    reject = fisher_decision(*jar, *mx, k, cfg.alpha).reject;
                } else {
                    degenerate = true;
                }
                break;
        }
        if (reject) ++tallies[mi].rejections;
        if (degenerate) ++tallies[mi].degenerate;
    }
}

}  // namespace

RejectionTable run_monte_carlo(const MCConfig& cfg, int threads) {
    cfg.validate();
    const bool need_jar = wants(cfg.methods, Method::Jar) || wants(cfg.methods, Method::Fisher);
    const bool need_max = wants(cfg.methods, Method::Bcch) || wants(cfg.methods, Method::BcchAsy) ||
                          wants(cfg.methods, Method::Fisher);
    if ((wants(cfg.methods, Method::BcchAsy) || wants(cfg.methods, Method::Fisher)) &&
        cfg.dgp.num_instruments < 2) {
        throw KTooSmallError("BCCH_ASY and FISHER need K >= 2");
    }

    const int total = cfg.replications;
    const int nthreads = std::clamp(threads, 1, total);
    std::vector<std::vector<Tally>> partial(static_cast<std::size_t>(nthreads),
                                            std::vector<Tally>(cfg.methods.size()));

    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto work = [&](int t) {
        try {
            for (int r = t; r < total; r += nthreads) {
                if (failed.load(std::memory_order_relaxed)) return;
                run_replication(cfg, derive_stream_seed(cfg.master_seed, static_cast<std::uint64_t>(r)),
                                need_jar, need_max, partial[static_cast<std::size_t>(t)]);
            }
        } catch (...) {
            if (!failed.exchange(true)) first_error = std::current_exception();
        }
    };

    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    RejectionTable table;
    table.rows.reserve(cfg.methods.size());
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        Tally sum;
        for (const auto& p : partial) {
            sum.rejections += p[mi].rejections;
            sum.degenerate += p[mi].degenerate;
        }
        RejectionRow row;
        row.dgp = cfg.dgp;
        row.method = cfg.methods[mi];
        row.alpha = cfg.alpha;
        row.gamma = cfg.gamma;
        row.replications = total;
        row.rejections = sum.rejections;
        row.degenerate = sum.degenerate;
        row.frequency = static_cast<double>(sum.rejections) / total;
        row.mc_standard_error = std::sqrt(row.frequency * (1.0 - row.frequency) / total);
        table.rows.push_back(row);
    }
    return table;
}

const char* example_name(ExampleId id) {
    switch (id) {
        case ExampleId::E1_1: return "E1_1";
        case ExampleId::E1_2: return "E1_2";
        case ExampleId::E2_1: return "E2_1";
        case ExampleId::E2_2: return "E2_2";
        case ExampleId::E3_1: return "E3_1";
        case ExampleId::E3_2: return "E3_2";
        case ExampleId::E4_1: return "E4_1";
        case ExampleId::E4_2: return "E4_2";
    }
    return "?";
}

std::optional<ExampleId> example_from_name(std::string_view name) {
    for (ExampleId id : all_examples()) {
        if (name == example_name(id)) return id;
    }
    return std::nullopt;
}

std::vector<ExampleId> all_examples() {
    return {ExampleId::E1_1, ExampleId::E1_2, ExampleId::E2_1, ExampleId::E2_2,
            ExampleId::E3_1, ExampleId::E3_2, ExampleId::E4_1, ExampleId::E4_2};
}

std::vector<MCConfig> example_suite(ExampleId id, const SuiteOverrides& overrides) {
    const std::uint64_t base_seed = overrides.master_seed.value_or(0);

    MCConfig proto;
    proto.dgp.n = 200;
    proto.dgp.beta0 = 1.0;
    proto.replications = overrides.replications.value_or(300);
    proto.alpha = overrides.alpha.value_or(0.05);
    if (overrides.methods) proto.methods = *overrides.methods;
    if (overrides.gamma) proto.gamma = *overrides.gamma;

    std::vector<MCConfig> out;
    auto push = [&](MCConfig cfg) {
        cfg.master_seed = derive_stream_seed(base_seed, out.size() + 1);
        out.push_back(std::move(cfg));
    };

    switch (id) {
        case ExampleId::E1_1:
        case ExampleId::E1_2:
        case ExampleId::E2_1:
        case ExampleId::E2_2:
        case ExampleId::E3_1:
        case ExampleId::E3_2: {
            const int idx = static_cast<int>(id) / 2;          // 0,1,2 -> E1,E2,E3
            const bool hetero = static_cast<int>(id) % 2 == 1;  // x.2 variants
            const int k = 100 * (idx + 1);
            for (double mu2 : {30.0, 180.0}) {
                for (SparsityKind kind : {SparsityKind::Sparse, SparsityKind::Dense}) {
                    for (double beta : {-1.0, 0.0, 1.0, 2.0, 3.0}) {
                        MCConfig cfg = proto;
                        cfg.dgp.num_instruments = k;
                        cfg.dgp.a0 = hetero ? 0.5 : 0.0;
                        cfg.dgp.mu2 = mu2;
                        cfg.dgp.sparsity.kind = kind;
                        cfg.dgp.sparsity.q = kind == SparsityKind::Sparse
                                                 ? ceil_fraction(3, k, 100)
                                                 : ceil_fraction(3, k, 5);
                        cfg.dgp.beta = beta;
                        push(std::move(cfg));
                    }
                }
            }
            break;
        }
        case ExampleId::E4_1:
            for (int k : {100, 200, 300}) {
                for (int q : {1, 3, 5, 7, 9}) {
                    for (double beta : {-1.0, 3.0}) {
                        MCConfig cfg = proto;
                        cfg.dgp.num_instruments = k;
                        cfg.dgp.mu2 = 30.0;
                        cfg.dgp.a0 = 0.0;
                        cfg.dgp.sparsity = Sparsity{SparsityKind::Sparse, q};
                        cfg.dgp.beta = beta;
                        push(std::move(cfg));
                    }
                }
            }
            break;
        case ExampleId::E4_2:
            for (int k : {100, 200, 300}) {
                for (int tenths : {2, 4, 6, 8, 10}) {
                    for (double beta : {-1.0, 3.0}) {
                        MCConfig cfg = proto;
                        cfg.dgp.num_instruments = k;
                        cfg.dgp.mu2 = 30.0;
                        cfg.dgp.a0 = 0.0;
                        cfg.dgp.sparsity = Sparsity{SparsityKind::Dense, ceil_fraction(tenths, k, 10)};
                        cfg.dgp.beta = beta;
                        push(std::move(cfg));
                    }
                }
            }
            break;
    }
    return out;
}

std::vector<TimingRow> timing_benchmark(const std::vector<int>& k_list, int reps) {
    if (reps < 1) throw InvalidInput("reps must be at least 1");
    if (k_list.empty()) throw InvalidInput("K list must not be empty");

    using clock = std::chrono::steady_clock;
    static volatile double sink = 0.0;  // keeps the timed calls observable

    std::vector<TimingRow> rows;
    std::uint64_t counter = 0;
    for (int k : k_list) {
        for (SparsityKind kind : {SparsityKind::Sparse, SparsityKind::Dense}) {
            DGPConfig dgp;
            dgp.n = 200;
            dgp.num_instruments = k;
            dgp.mu2 = 30.0;
            dgp.a0 = 0.0;
            dgp.sparsity.kind = kind;
            dgp.sparsity.q =
                kind == SparsityKind::Sparse ? ceil_fraction(3, k, 100) : ceil_fraction(3, k, 5);

            double rjar_total = 0.0;
            double jar_total = 0.0;
            for (int r = 0; r < reps; ++r) {
                const Dataset data = generate(dgp, derive_stream_seed(0x7131ULL, counter++));
                const Residuals res = residuals(data, dgp.beta0);

                auto t0 = clock::now();
                sink = sink + rjar_statistic(data, res, 1.0);
                auto t1 = clock::now();
                sink = sink + jar_statistic(data, res);
                auto t2 = clock::now();

                rjar_total += std::chrono::duration<double>(t1 - t0).count();
                jar_total += std::chrono::duration<double>(t2 - t1).count();
            }
            rows.push_back({k, kind, Method::Rjar, rjar_total / reps});
            rows.push_back({k, kind, Method::Jar, jar_total / reps});
        }
    }
    return rows;
}

std::vector<CriticalValueRow> critical_value_curve(const std::vector<int>& k_list, double alpha) {
    check_alpha(alpha);
    std::vector<CriticalValueRow> rows;
    rows.reserve(k_list.size());
    for (int k : k_list) {
        if (k < 2) throw InvalidInput("critical_value_curve needs K >= 2");
        const double log_k = std::log(static_cast<double>(k));
        CriticalValueRow row;
        row.num_instruments = k;
        row.bcch_threshold = 1.1 * prob::normal_upper_quantile(alpha / (2.0 * k));
        row.refined_threshold =
            std::sqrt(2.0 * log_k - std::log(log_k) + prob::gumbel_upper_quantile(alpha));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace weakiv
