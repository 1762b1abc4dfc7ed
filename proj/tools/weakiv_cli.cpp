// Command-line front end: every subcommand is a thin shell over a library
// call, and the record it emits is byte-identical to serializing the direct
// library result.
//
// Exit codes: 0 computed, 2 usage error, 3 data error, 4 degenerate statistic.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakiv/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::optional<std::string>& path, const std::string& content) {
    if (!path) {
        std::cout << content;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) {
        throw weakiv::DataError("cannot open output file: " + *path);
    }
    out << content;
    if (!out) {
        throw weakiv::DataError("failed writing output file: " + *path);
    }
}

weakiv::Method parse_method(const std::string& name) {
    const auto m = weakiv::method_from_name(name);
    if (!m) {
        throw UsageError("unknown method '" + name + "' (expected jar, rjar, bcch, bcch_asy or fisher)");
    }
    return *m;
}

void check_alpha_flag(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("--alpha must lie strictly in (0,1)");
    }
}

std::vector<weakiv::Method> parse_method_list(const std::string& csv) {
    std::vector<weakiv::Method> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        if (!cur.empty()) out.push_back(parse_method(cur));
    }
    if (out.empty()) throw UsageError("--methods needs at least one method");
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("WEAKIV_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

void print_warnings(const weakiv::io::LoadReport& report) {
    for (const std::string& w : report.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

// ---------------------------------------------------------------------------

struct TestArgs {
    std::string dataset;
    double beta0 = 0.0;
    std::string method;
    double alpha = 0.05;
    std::optional<double> gamma;
    bool no_center = false;
    std::string z_prefix = "Z";
    std::optional<std::string> out;
};

int run_test_cmd(const TestArgs& a) {
    check_alpha_flag(a.alpha);
    const weakiv::Method method = parse_method(a.method);
    if (method == weakiv::Method::Rjar && !a.gamma) {
        throw UsageError("method rjar requires --gamma");
    }
    weakiv::io::LoadOptions opts;
    opts.center = !a.no_center;
    opts.z_prefix = a.z_prefix;
    const auto loaded = weakiv::io::load_dataset(a.dataset, opts);
    print_warnings(loaded.report);

    const weakiv::TestResult result =
        weakiv::test_at(loaded.data, a.beta0, method, a.alpha, a.gamma);
    const std::string record = weakiv::io::test_result_json(result);
    write_output(a.out, record);
    if (a.out) {
        std::cout << weakiv::method_name(result.method) << ": statistic=" << result.statistic
                  << " p=" << result.p_value << " critical=" << result.critical_value
                  << " reject=" << (result.reject ? "yes" : "no") << "\n";
    }
    return kExitOk;
}

struct InvertArgs {
    std::string dataset;
    std::string method;
    double alpha = 0.05;
    std::optional<double> beta0;
    std::optional<double> grid_lo;
    std::optional<double> grid_hi;
    int grid_points = 100;
    std::optional<double> gamma;
    bool no_center = false;
    std::string z_prefix = "Z";
    std::optional<std::string> out;
};

int run_invert_cmd(const InvertArgs& a) {
    check_alpha_flag(a.alpha);
    const weakiv::Method method = parse_method(a.method);
    if (method == weakiv::Method::Rjar && !a.gamma) {
        throw UsageError("method rjar requires --gamma");
    }
    weakiv::GridSpec grid;
    grid.num_points = a.grid_points;
    if (a.grid_lo && a.grid_hi) {
        grid.lo = *a.grid_lo;
        grid.hi = *a.grid_hi;
    } else if (a.grid_lo || a.grid_hi) {
        throw UsageError("--grid-lo and --grid-hi must be given together");
    } else if (a.beta0) {
        grid.lo = *a.beta0 - 5.0;
        grid.hi = *a.beta0 + 5.0;
        std::cerr << "warning: no grid endpoints given; using the arbitrary default ["
                  << grid.lo << ", " << grid.hi << "] around --beta0\n";
    } else {
        throw UsageError("give --grid-lo/--grid-hi, or --beta0 as a focal value for the default grid");
    }

    weakiv::io::LoadOptions opts;
    opts.center = !a.no_center;
    opts.z_prefix = a.z_prefix;
    const auto loaded = weakiv::io::load_dataset(a.dataset, opts);
    print_warnings(loaded.report);

    const weakiv::ConfidenceSet cs = weakiv::invert(loaded.data, grid, method, a.alpha, a.gamma);
    std::cout << weakiv::io::confidence_set_json(cs);
    if (a.out) {
        write_output(a.out, weakiv::io::confidence_set_csv(cs));
    }
    std::cerr << "confidence set (" << weakiv::method_name(method) << ", alpha=" << a.alpha
              << "): " << cs.intervals.size() << " interval(s), total length " << cs.total_length
              << ", " << cs.undefined_points.size() << " undefined point(s)\n";
    return kExitOk;
}

struct SimulateArgs {
    std::optional<std::string> example;
    std::optional<std::string> config;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<std::string> methods;
    std::optional<double> gamma;
    int threads = default_threads();
    std::optional<std::string> out;
};

int run_simulate_cmd(const SimulateArgs& a) {
    if (a.example.has_value() == a.config.has_value()) {
        throw UsageError("give exactly one of --example or --config");
    }
    if (a.threads < 1) throw UsageError("--threads must be at least 1");
    if (a.alpha) check_alpha_flag(*a.alpha);

    std::vector<weakiv::MCConfig> configs;
    if (a.example) {
        const auto id = weakiv::example_from_name(*a.example);
        if (!id) {
            throw UsageError("unknown example id '" + *a.example +
                             "' (expected E1_1..E4_2, e.g. E1_1)");
        }
        weakiv::SuiteOverrides overrides;
        overrides.replications = a.reps;
        overrides.alpha = a.alpha;
        overrides.master_seed = a.seed;
        if (a.methods) overrides.methods = parse_method_list(*a.methods);
        overrides.gamma = a.gamma;
        configs = weakiv::example_suite(*id, overrides);
    } else {
        weakiv::MCConfig cfg = weakiv::io::load_run_config(*a.config);
        if (a.reps) cfg.replications = *a.reps;
        if (a.seed) cfg.master_seed = *a.seed;
        if (a.alpha) cfg.alpha = *a.alpha;
        if (a.methods) cfg.methods = parse_method_list(*a.methods);
        if (a.gamma) cfg.gamma = *a.gamma;
        configs.push_back(std::move(cfg));
    }

    weakiv::RejectionTable table;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const weakiv::RejectionTable part = weakiv::run_monte_carlo(configs[i], a.threads);
        table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
        std::cerr << "simulate: config " << (i + 1) << "/" << configs.size() << " done\n";
    }
    write_output(a.out, weakiv::io::rejection_table_csv(table));
    return kExitOk;
}

struct BenchArgs {
    std::vector<int> k_list{100, 200, 300};
    int reps = 5;
    std::optional<std::string> out;
};

int run_bench_cmd(const BenchArgs& a) {
    if (a.reps < 1) throw UsageError("--reps must be at least 1");
    const auto rows = weakiv::timing_benchmark(a.k_list, a.reps);
    write_output(a.out, weakiv::io::timing_table_csv(rows));
    std::cerr << "note: RJAR rows time the statistic at a fixed gamma; published ridge timings"
                 " usually also include the gamma-selection search, so only the ordering"
                 " (JAR faster) is portable\n";
    return kExitOk;
}

struct CurveArgs {
    std::vector<int> k_list{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    double alpha = 0.05;
    std::optional<std::string> out;
};

int run_curve_cmd(const CurveArgs& a) {
    check_alpha_flag(a.alpha);
    const auto rows = weakiv::critical_value_curve(a.k_list, a.alpha);
    write_output(a.out, weakiv::io::critical_value_csv(rows));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak-instrument-robust IV inference: tests, confidence sets, simulations"};
    app.require_subcommand(1);

    TestArgs targs;
    CLI::App* test = app.add_subcommand("test", "Test H0: beta = beta0 on a dataset");
    test->add_option("dataset", targs.dataset, "CSV file with columns Y, X, Z1..ZK")->required();
    test->add_option("--beta0", targs.beta0, "hypothesized coefficient")->required();
    test->add_option("--method", targs.method, "jar | rjar | bcch | bcch_asy | fisher")->required();
    test->add_option("--alpha", targs.alpha, "significance level (default 0.05)");
    test->add_option("--gamma", targs.gamma, "ridge parameter (required for rjar)");
    test->add_flag("--no-center", targs.no_center, "skip centering of X and Z columns");
    test->add_option("--z-prefix", targs.z_prefix, "instrument column prefix (default Z)");
    test->add_option("--out", targs.out, "write the JSON record here instead of stdout");

    InvertArgs iargs;
    CLI::App* inv = app.add_subcommand("invert", "Confidence set for beta by grid test inversion");
    inv->add_option("dataset", iargs.dataset, "CSV file with columns Y, X, Z1..ZK")->required();
    inv->add_option("--method", iargs.method, "jar | rjar | bcch | bcch_asy | fisher")->required();
    inv->add_option("--alpha", iargs.alpha, "significance level (default 0.05)");
    inv->add_option("--beta0", iargs.beta0, "focal value for the default grid [beta0-5, beta0+5]");
    inv->add_option("--grid-lo", iargs.grid_lo, "grid lower endpoint");
    inv->add_option("--grid-hi", iargs.grid_hi, "grid upper endpoint");
    inv->add_option("--grid-points", iargs.grid_points, "number of grid points (default 100)");
    inv->add_option("--gamma", iargs.gamma, "ridge parameter (required for rjar)");
    inv->add_flag("--no-center", iargs.no_center, "skip centering of X and Z columns");
    inv->add_option("--z-prefix", iargs.z_prefix, "instrument column prefix (default Z)");
    inv->add_option("--out", iargs.out, "write the per-point decision table (CSV) here");

    SimulateArgs sargs;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo rejection-frequency sweep");
    sim->add_option("--example", sargs.example, "example id: E1_1 E1_2 E2_1 E2_2 E3_1 E3_2 E4_1 E4_2");
    sim->add_option("--config", sargs.config, "JSON run config (single Monte Carlo cell)");
    sim->add_option("--reps", sargs.reps, "replications per config");
    sim->add_option("--seed", sargs.seed, "master seed");
    sim->add_option("--alpha", sargs.alpha, "significance level");
    sim->add_option("--methods", sargs.methods, "comma-separated method list");
    sim->add_option("--gamma", sargs.gamma, "ridge parameter for RJAR rows");
    sim->add_option("--threads", sargs.threads,
                    "worker threads (default WEAKIV_THREADS or 1); output is thread-count invariant");
    sim->add_option("--out", sargs.out, "write the rejection table (CSV) here instead of stdout");

    BenchArgs bargs;
    CLI::App* bench = app.add_subcommand("bench", "Average statistic computation time per K");
    bench->add_option("--K", bargs.k_list, "instrument counts (default 100 200 300)")->delimiter(',');
    bench->add_option("--reps", bargs.reps, "repetitions per cell (default 5)");
    bench->add_option("--out", bargs.out, "write the timing table (CSV) here instead of stdout");

    CurveArgs cargs;
    CLI::App* curve = app.add_subcommand("curve", "Max-statistic critical value thresholds per K");
    curve->add_option("--K", cargs.k_list, "instrument counts (default 100..1000 step 100)")
        ->delimiter(',');
    curve->add_option("--alpha", cargs.alpha, "significance level (default 0.05)");
    curve->add_option("--out", cargs.out, "write the curve table (CSV) here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (test->parsed()) return run_test_cmd(targs);
        if (inv->parsed()) return run_invert_cmd(iargs);
        if (sim->parsed()) return run_simulate_cmd(sargs);
        if (bench->parsed()) return run_bench_cmd(bargs);
        if (curve->parsed()) return run_curve_cmd(cargs);
        return kExitUsage;
    } catch (const UsageError& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const weakiv::InvalidInput& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const weakiv::StatisticUndefined& ex) {
        std::cerr << "degenerate statistic: " << ex.what() << "\n";
        return kExitDegenerate;
    } catch (const weakiv::DataError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return kExitData;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUnexpected;
    }
}
