#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "weakiv/inference.hpp"
#include "weakiv/io.hpp"
#include "weakiv/prob.hpp"
#include "weakiv/simulation.hpp"

namespace py = pybind11;
using namespace weakiv;

namespace {

SuiteOverrides make_overrides(std::optional<int> replications, std::optional<double> alpha,
                              std::optional<std::uint64_t> master_seed,
                              std::optional<std::vector<Method>> methods,
                              std::optional<double> gamma) {
    SuiteOverrides o;
    o.replications = replications;
    o.alpha = alpha;
    o.master_seed = master_seed;
    o.methods = std::move(methods);
    o.gamma = gamma;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weak-instrument-robust IV inference: quadratic, max-type and "
              "Fisher-combination tests, confidence sets, and Monte Carlo tools";

    py::register_exception<StatisticUndefined>(m, "StatisticUndefined", PyExc_RuntimeError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    // --- probability kernels ---------------------------------------------
    auto prob = m.def_submodule("prob", "CDFs, survival functions, and upper quantiles");
    prob.def("normal_cdf", &prob::normal_cdf, py::arg("x"));
    prob.def("normal_sf", &prob::normal_sf, py::arg("x"));
    prob.def("normal_upper_quantile", &prob::normal_upper_quantile, py::arg("alpha"));
    prob.def("gumbel_cdf", &prob::gumbel_cdf, py::arg("x"));
    prob.def("gumbel_sf", &prob::gumbel_sf, py::arg("x"));
    prob.def("gumbel_upper_quantile", &prob::gumbel_upper_quantile, py::arg("alpha"));
    prob.def("chi2_4_cdf", &prob::chi2_4_cdf, py::arg("x"));
    prob.def("chi2_4_sf", &prob::chi2_4_sf, py::arg("x"));
    prob.def("chi2_4_upper_quantile", &prob::chi2_4_upper_quantile, py::arg("alpha"));
    prob.def("clamp_pvalue", &prob::clamp_pvalue, py::arg("p"));

    // --- core types --------------------------------------------------------
    py::enum_<Method>(m, "Method")
        .value("JAR", Method::Jar)
        .value("RJAR", Method::Rjar)
        .value("BCCH", Method::Bcch)
        .value("BCCH_ASY", Method::BcchAsy)
        .value("FISHER", Method::Fisher);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd z) {
                 Dataset d{std::move(y), std::move(x), std::move(z)};
                 d.validate();
                 return d;
             }),
             py::arg("y"), py::arg("x"), py::arg("z"))
        .def_readonly("y", &Dataset::y)
        .def_readonly("x", &Dataset::x)
        .def_readonly("z", &Dataset::z)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("num_instruments", &Dataset::num_instruments);

    py::class_<Residuals>(m, "Residuals")
        .def_readonly("e", &Residuals::e)
        .def_readonly("beta0", &Residuals::beta0);

    py::class_<TestDetail>(m, "TestDetail")
        .def_readonly("p_jar", &TestDetail::p_jar)
        .def_readonly("p_max", &TestDetail::p_max)
        .def_readonly("jar_value", &TestDetail::jar_value)
        .def_readonly("max_sq_value", &TestDetail::max_sq_value)
        .def_readonly("conservative_p_value", &TestDetail::conservative_p_value);

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("method", &TestResult::method)
        .def_readonly("statistic", &TestResult::statistic)
        .def_readonly("p_value", &TestResult::p_value)
        .def_readonly("critical_value", &TestResult::critical_value)
        .def_readonly("reject", &TestResult::reject)
        .def_readonly("alpha", &TestResult::alpha)
        .def_readonly("detail", &TestResult::detail)
        .def("__repr__", [](const TestResult& r) {
            return std::string("TestResult(") + method_name(r.method) +
                   ", statistic=" + std::to_string(r.statistic) +
                   ", p=" + std::to_string(r.p_value) + ", reject=" + (r.reject ? "True" : "False") +
                   ")";
        });

    // --- statistics ---------------------------------------------------------
    m.def("residuals", &residuals, py::arg("data"), py::arg("beta0"));
    m.def("jar_statistic", &jar_statistic, py::arg("data"), py::arg("residuals"));
    m.def("rjar_statistic", &rjar_statistic, py::arg("data"), py::arg("residuals"),
          py::arg("gamma"));
    m.def(
        "max_statistic",
        [](const Dataset& d, const Residuals& r) {
            MaxStatistic s = max_statistic(d, r);
            // move so the numpy array owns the buffer instead of aliasing a local
            return py::make_tuple(s.value, py::cast(std::move(s.per_instrument)));
        },
        py::arg("data"), py::arg("residuals"),
        "Returns (max_value, per_instrument); NaN entries mark degenerate columns");
    m.def("omega_hat", &omega_hat, py::arg("data"), py::arg("residuals"));
    m.def("bcch_decision", &bcch_decision, py::arg("max_stat"), py::arg("num_instruments"),
          py::arg("alpha"));
    m.def("bcch_asy_decision", &bcch_asy_decision, py::arg("max_stat"), py::arg("num_instruments"),
          py::arg("alpha"));
    m.def("fisher_statistic", &fisher_statistic, py::arg("p_jar"), py::arg("p_max"));
    m.def("run_test", &run_test, py::arg("data"), py::arg("beta0"), py::arg("method"),
          py::arg("alpha") = 0.05, py::arg("gamma") = std::nullopt);
    m.def("theoretical_local_power", &theoretical_local_power, py::arg("zeta"), py::arg("sigma_z"),
          py::arg("omega"), py::arg("n"), py::arg("alpha"));

    // --- inference ----------------------------------------------------------
    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double lo, double hi, int num_points) {
                 GridSpec g{lo, hi, num_points};
                 g.validate();
                 return g;
             }),
             py::arg("lo"), py::arg("hi"), py::arg("num_points") = 100)
        .def_readonly("lo", &GridSpec::lo)
        .def_readonly("hi", &GridSpec::hi)
        .def_readonly("num_points", &GridSpec::num_points)
        .def("points", &GridSpec::points)
        .def("spacing", &GridSpec::spacing);

    py::enum_<PointStatus>(m, "PointStatus")
        .value("ACCEPTED", PointStatus::Accepted)
        .value("REJECTED", PointStatus::Rejected)
        .value("UNDEFINED", PointStatus::Undefined);

    py::class_<ConfidenceSet>(m, "ConfidenceSet")
        .def_readonly("method", &ConfidenceSet::method)
        .def_readonly("alpha", &ConfidenceSet::alpha)
        .def_readonly("grid", &ConfidenceSet::grid)
        .def_readonly("status", &ConfidenceSet::status)
        .def_readonly("accepted", &ConfidenceSet::accepted)
        .def_readonly("statistics", &ConfidenceSet::statistics)
        .def_readonly("p_values", &ConfidenceSet::p_values)
        .def_readonly("intervals", &ConfidenceSet::intervals)
        .def_readonly("undefined_points", &ConfidenceSet::undefined_points)
        .def_readonly("total_length", &ConfidenceSet::total_length);

    m.def("test_at", &test_at, py::arg("data"), py::arg("beta0"), py::arg("method"),
          py::arg("alpha") = 0.05, py::arg("gamma") = std::nullopt);
    m.def("invert", &invert, py::arg("data"), py::arg("grid"), py::arg("method"),
          py::arg("alpha") = 0.05, py::arg("gamma") = std::nullopt);

    // --- simulation -----------------------------------------------------------
    py::enum_<SparsityKind>(m, "SparsityKind")
        .value("SPARSE", SparsityKind::Sparse)
        .value("DENSE", SparsityKind::Dense);

    py::class_<Sparsity>(m, "Sparsity")
        .def(py::init([](SparsityKind kind, int q) { return Sparsity{kind, q}; }), py::arg("kind"),
             py::arg("q"))
        .def_readwrite("kind", &Sparsity::kind)
        .def_readwrite("q", &Sparsity::q);

    py::class_<DGPConfig>(m, "DGPConfig")
        .def(py::init<>())
        .def_readwrite("n", &DGPConfig::n)
        .def_readwrite("num_instruments", &DGPConfig::num_instruments)
        .def_readwrite("rho", &DGPConfig::rho)
        .def_readwrite("mu2", &DGPConfig::mu2)
        .def_readwrite("sparsity", &DGPConfig::sparsity)
        .def_readwrite("a0", &DGPConfig::a0)
        .def_readwrite("sigma_eps2", &DGPConfig::sigma_eps2)
        .def_readwrite("sigma_v2", &DGPConfig::sigma_v2)
        .def_readwrite("eta_corr", &DGPConfig::eta_corr)
        .def_readwrite("beta", &DGPConfig::beta)
        .def_readwrite("beta0", &DGPConfig::beta0);

    py::class_<MCConfig>(m, "MCConfig")
        .def(py::init<>())
        .def_readwrite("dgp", &MCConfig::dgp)
        .def_readwrite("replications", &MCConfig::replications)
        .def_readwrite("alpha", &MCConfig::alpha)
        .def_readwrite("master_seed", &MCConfig::master_seed)
        .def_readwrite("methods", &MCConfig::methods)
        .def_readwrite("gamma", &MCConfig::gamma);

    py::class_<RejectionRow>(m, "RejectionRow")
        .def_readonly("dgp", &RejectionRow::dgp)
        .def_readonly("method", &RejectionRow::method)
        .def_readonly("alpha", &RejectionRow::alpha)
        .def_readonly("gamma", &RejectionRow::gamma)
        .def_readonly("replications", &RejectionRow::replications)
        .def_readonly("rejections", &RejectionRow::rejections)
        .def_readonly("degenerate", &RejectionRow::degenerate)
        .def_readonly("frequency", &RejectionRow::frequency)
        .def_readonly("mc_standard_error", &RejectionRow::mc_standard_error);

    py::class_<RejectionTable>(m, "RejectionTable")
        .def_readonly("rows", &RejectionTable::rows);

    m.def("calibrate_tau", &calibrate_tau, py::arg("psi"), py::arg("sigma_z"), py::arg("mu2"),
          py::arg("n"), py::arg("sigma_v2"));
    m.def("ar1_covariance", &ar1_covariance, py::arg("num_instruments"), py::arg("rho"));
    m.def("sparsity_direction", &sparsity_direction, py::arg("sparsity"),
          py::arg("num_instruments"));
    m.def("generate", &generate, py::arg("dgp"), py::arg("seed"));
    m.def("run_monte_carlo", &run_monte_carlo, py::arg("config"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::enum_<ExampleId>(m, "ExampleId")
        .value("E1_1", ExampleId::E1_1)
        .value("E1_2", ExampleId::E1_2)
        .value("E2_1", ExampleId::E2_1)
        .value("E2_2", ExampleId::E2_2)
        .value("E3_1", ExampleId::E3_1)
        .value("E3_2", ExampleId::E3_2)
        .value("E4_1", ExampleId::E4_1)
        .value("E4_2", ExampleId::E4_2);

    m.def(
        "example_suite",
        [](ExampleId id, std::optional<int> replications, std::optional<double> alpha,
           std::optional<std::uint64_t> master_seed, std::optional<std::vector<Method>> methods,
           std::optional<double> gamma) {
            return example_suite(
                id, make_overrides(replications, alpha, master_seed, std::move(methods), gamma));
        },
        py::arg("example"), py::arg("replications") = std::nullopt, py::arg("alpha") = std::nullopt,
        py::arg("master_seed") = std::nullopt, py::arg("methods") = std::nullopt,
        py::arg("gamma") = std::nullopt);

    py::class_<TimingRow>(m, "TimingRow")
        .def_readonly("num_instruments", &TimingRow::num_instruments)
        .def_readonly("sparsity", &TimingRow::sparsity)
        .def_readonly("method", &TimingRow::method)
        .def_readonly("mean_seconds", &TimingRow::mean_seconds);

    py::class_<CriticalValueRow>(m, "CriticalValueRow")
        .def_readonly("num_instruments", &CriticalValueRow::num_instruments)
        .def_readonly("bcch_threshold", &CriticalValueRow::bcch_threshold)
        .def_readonly("refined_threshold", &CriticalValueRow::refined_threshold);

    m.def("timing_benchmark", &timing_benchmark, py::arg("k_list"), py::arg("reps"));
    m.def("critical_value_curve", &critical_value_curve, py::arg("k_list"), py::arg("alpha"));

    // --- io ---------------------------------------------------------------
    py::class_<io::LoadReport>(m, "LoadReport")
        .def_readonly("x_shift", &io::LoadReport::x_shift)
        .def_readonly("z_shifts", &io::LoadReport::z_shifts)
        .def_readonly("warnings", &io::LoadReport::warnings);

    m.def(
        "load_dataset",
        [](const std::string& path, bool center, const std::string& z_prefix) {
            io::LoadOptions opts;
            opts.center = center;
            opts.z_prefix = z_prefix;
            auto loaded = io::load_dataset(path, opts);
            return py::make_tuple(std::move(loaded.data), std::move(loaded.report));
        },
        py::arg("path"), py::arg("center") = true, py::arg("z_prefix") = "Z",
        "Returns (Dataset, LoadReport)");
}
