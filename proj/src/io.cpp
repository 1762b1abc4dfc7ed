#include "weakiv/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace weakiv::io {

namespace {

using json = nlohmann::json;

// Shortest exact decimal form: 17 significant digits round-trip any double.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double_field(const std::string& cell, const char* what) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw DataError(std::string("cannot parse ") + what + " from '" + cell + "'");
    }
    return v;
}

long parse_long_field(const std::string& cell, const char* what) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(std::string("cannot parse ") + what + " from '" + cell + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

json detail_to_json(const TestDetail& d) {
    json j = json::object();
    if (d.p_jar) j["p_jar"] = *d.p_jar;
    if (d.p_max) j["p_max"] = *d.p_max;
    if (d.jar_value) j["jar_value"] = *d.jar_value;
    if (d.max_sq_value) j["max_sq_value"] = *d.max_sq_value;
    if (d.conservative_p_value) j["conservative_p_value"] = true;
    return j;
}

json sparsity_to_json(const Sparsity& s) {
    return json{{"kind", sparsity_name(s.kind)}, {"q", s.q}};
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; }) == allowed.end()) {
            throw DataError(std::string("unknown key '") + it.key() + "' in " + where);
        }
    }
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file: " + path);
    }
    return parse_dataset_csv(in, options, path);
}

LoadedDataset parse_dataset_csv(std::istream& in, const LoadOptions& options,
                                const std::string& display_name) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(display_name + ": empty file");
    }
    const std::vector<std::string> header = split_csv_line(line);

    long y_col = -1;
    long x_col = -1;
    std::map<long, long> z_cols;  // instrument index -> file column
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == "Y") {
            y_col = static_cast<long>(c);
        } else if (name == "X") {
            x_col = static_cast<long>(c);
        } else if (name.size() > options.z_prefix.size() &&
                   name.compare(0, options.z_prefix.size(), options.z_prefix) == 0) {
            const std::string idx = name.substr(options.z_prefix.size());
            if (std::all_of(idx.begin(), idx.end(),
                            [](unsigned char ch) { return std::isdigit(ch); })) {
                long index = 0;
                auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
                if (ec != std::errc() || ptr != idx.data() + idx.size()) continue;
                if (!z_cols.emplace(index, static_cast<long>(c)).second) {
                    throw MissingColumnError(display_name + ": duplicate instrument column " +
                                             name);
                }
            }
        }
    }
    if (y_col < 0) throw MissingColumnError(display_name + ": missing required column 'Y'");
    if (x_col < 0) throw MissingColumnError(display_name + ": missing required column 'X'");
    if (z_cols.empty()) {
        throw MissingColumnError(display_name + ": no instrument columns with prefix '" +
                                 options.z_prefix + "'");
    }
    const long k = static_cast<long>(z_cols.size());
    for (long j = 1; j <= k; ++j) {
        if (z_cols.find(j) == z_cols.end()) {
            throw MissingColumnError(display_name + ": instrument columns must be " +
                                     options.z_prefix + "1.." + options.z_prefix +
                                     std::to_string(k) + "; missing " + options.z_prefix +
                                     std::to_string(j));
        }
    }

    std::vector<double> ys, xs;
    std::vector<std::vector<double>> zs;  // row-major
    long file_row = 1;                    // header was row 1
    while (std::getline(in, line)) {
        ++file_row;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(display_name + ": expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             file_row, static_cast<long>(cells.size()));
        }
        auto cell_value = [&](long col) {
            const std::string cell = trim(cells[static_cast<std::size_t>(col)]);
            if (cell.empty()) {
                throw ParseError(display_name + ": empty cell", file_row, col + 1);
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ParseError(display_name + ": cannot parse '" + cell + "' as a number",
                                 file_row, col + 1);
            }
            if (!std::isfinite(v)) {
                throw NonFiniteValueError(display_name + ": non-finite value '" + cell + "'",
                                          file_row, col + 1);
            }
            return v;
        };
        ys.push_back(cell_value(y_col));
        xs.push_back(cell_value(x_col));
        std::vector<double> zrow(static_cast<std::size_t>(k));
        for (long j = 1; j <= k; ++j) {
            zrow[static_cast<std::size_t>(j - 1)] = cell_value(z_cols[j]);
        }
        zs.push_back(std::move(zrow));
    }
    const long n = static_cast<long>(ys.size());
    if (n < 2) {
        throw DataError(display_name + ": dataset needs at least 2 data rows, found " +
                        std::to_string(n));
    }

    LoadedDataset out;
    out.data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    out.data.x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
    out.data.z.resize(n, k);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < k; ++j) {
            out.data.z(i, j) = zs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }

    out.report.z_shifts.assign(static_cast<std::size_t>(k), 0.0);
    if (options.center) {
        out.report.x_shift = out.data.x.mean();
        out.data.x.array() -= out.report.x_shift;
        for (long j = 0; j < k; ++j) {
            const double mean = out.data.z.col(j).mean();
            out.report.z_shifts[static_cast<std::size_t>(j)] = mean;
            out.data.z.col(j).array() -= mean;
            if (out.data.z.col(j).cwiseAbs().maxCoeff() == 0.0) {
                out.report.warnings.push_back("instrument column " + options.z_prefix +
                                              std::to_string(j + 1) +
                                              " is constant; centered to all zeros (degenerate)");
            }
        }
    }
    out.data.validate();
    return out;
}

std::string test_result_json(const TestResult& result) {
    json j;
    j["method"] = method_name(result.method);
    j["alpha"] = result.alpha;
    j["statistic"] = result.statistic;
    j["p_value"] = result.p_value;
    j["critical_value"] = result.critical_value;
    j["reject"] = result.reject;
    const json d = detail_to_json(result.detail);
    if (!d.empty()) j["detail"] = d;
    return j.dump(2) + "\n";
}

std::string confidence_set_json(const ConfidenceSet& cs) {
    json pts = json::array();
    for (std::size_t i = 0; i < cs.grid.size(); ++i) {
        json p;
        p["beta0"] = cs.grid[i];
        p["status"] = point_status_name(cs.status[i]);
        if (cs.status[i] != PointStatus::Undefined) {
            p["statistic"] = cs.statistics[i];
            p["p_value"] = cs.p_values[i];
        }
        pts.push_back(std::move(p));
    }
    json intervals = json::array();
    for (const auto& [lo, hi] : cs.intervals) intervals.push_back(json::array({lo, hi}));

    json j;
    j["method"] = method_name(cs.method);
    j["alpha"] = cs.alpha;
    j["num_points"] = cs.grid.size();
    j["points"] = std::move(pts);
    j["intervals"] = std::move(intervals);
    j["undefined_points"] = cs.undefined_points;
    j["total_length"] = cs.total_length;
    return j.dump(2) + "\n";
}

std::string confidence_set_csv(const ConfidenceSet& cs) {
    std::ostringstream out;
    out << "beta0,status,statistic,p_value\n";
    for (std::size_t i = 0; i < cs.grid.size(); ++i) {
        out << fmt_double(cs.grid[i]) << ',' << point_status_name(cs.status[i]) << ',';
        if (cs.status[i] == PointStatus::Undefined) {
            out << "NA,NA\n";
        } else {
            out << fmt_double(cs.statistics[i]) << ',' << fmt_double(cs.p_values[i]) << '\n';
        }
    }
    return out.str();
}

namespace {
constexpr const char* kRejectionHeader =
    "n,K,rho,mu2,sparsity,q,a0,sigma_eps2,sigma_v2,eta_corr,beta,beta0,"
    "method,alpha,gamma,replications,rejections,degenerate,frequency,mc_se";
}

std::string rejection_table_csv(const RejectionTable& table) {
    std::ostringstream out;
    out << kRejectionHeader << '\n';
    for (const RejectionRow& r : table.rows) {
        out << r.dgp.n << ',' << r.dgp.num_instruments << ',' << fmt_double(r.dgp.rho) << ','
            << fmt_double(r.dgp.mu2) << ',' << sparsity_name(r.dgp.sparsity.kind) << ','
            << r.dgp.sparsity.q << ',' << fmt_double(r.dgp.a0) << ','
            << fmt_double(r.dgp.sigma_eps2) << ',' << fmt_double(r.dgp.sigma_v2) << ','
            << fmt_double(r.dgp.eta_corr) << ',' << fmt_double(r.dgp.beta) << ','
            << fmt_double(r.dgp.beta0) << ',' << method_name(r.method) << ','
            << fmt_double(r.alpha) << ',' << fmt_double(r.gamma) << ',' << r.replications << ','
            << r.rejections << ',' << r.degenerate << ',' << fmt_double(r.frequency) << ','
            << fmt_double(r.mc_standard_error) << '\n';
    }
    return out.str();
}

RejectionTable parse_rejection_table_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kRejectionHeader) {
        throw DataError("rejection table: unexpected header");
    }
    RejectionTable table;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> c = split_csv_line(line);
        if (c.size() != 20) {
            throw DataError("rejection table: expected 20 cells per row");
        }
        RejectionRow r;
        r.dgp.n = static_cast<int>(parse_long_field(c[0], "n"));
        r.dgp.num_instruments = static_cast<int>(parse_long_field(c[1], "K"));
        r.dgp.rho = parse_double_field(c[2], "rho");
        r.dgp.mu2 = parse_double_field(c[3], "mu2");
        if (c[4] == "sparse") {
            r.dgp.sparsity.kind = SparsityKind::Sparse;
        } else if (c[4] == "dense") {
            r.dgp.sparsity.kind = SparsityKind::Dense;
        } else {
            throw DataError("rejection table: unknown sparsity '" + c[4] + "'");
        }
        r.dgp.sparsity.q = static_cast<int>(parse_long_field(c[5], "q"));
        r.dgp.a0 = parse_double_field(c[6], "a0");
        r.dgp.sigma_eps2 = parse_double_field(c[7], "sigma_eps2");
        r.dgp.sigma_v2 = parse_double_field(c[8], "sigma_v2");
        r.dgp.eta_corr = parse_double_field(c[9], "eta_corr");
        r.dgp.beta = parse_double_field(c[10], "beta");
        r.dgp.beta0 = parse_double_field(c[11], "beta0");
        const auto m = method_from_name(c[12]);
        if (!m) throw DataError("rejection table: unknown method '" + c[12] + "'");
        r.method = *m;
        r.alpha = parse_double_field(c[13], "alpha");
        r.gamma = parse_double_field(c[14], "gamma");
        r.replications = static_cast<int>(parse_long_field(c[15], "replications"));
        r.rejections = parse_long_field(c[16], "rejections");
        r.degenerate = parse_long_field(c[17], "degenerate");
        r.frequency = parse_double_field(c[18], "frequency");
        r.mc_standard_error = parse_double_field(c[19], "mc_se");
        table.rows.push_back(r);
    }
    return table;
}

std::string timing_table_csv(const std::vector<TimingRow>& rows) {
    std::ostringstream out;
    out << "K,sparsity,method,mean_seconds\n";
    for (const TimingRow& r : rows) {
        out << r.num_instruments << ',' << sparsity_name(r.sparsity) << ',' << method_name(r.method)
            << ',' << fmt_double(r.mean_seconds) << '\n';
    }
    return out.str();
}

std::string critical_value_csv(const std::vector<CriticalValueRow>& rows) {
    std::ostringstream out;
    out << "K,bcch_threshold,refined_threshold\n";
    for (const CriticalValueRow& r : rows) {
        out << r.num_instruments << ',' << fmt_double(r.bcch_threshold) << ','
            << fmt_double(r.refined_threshold) << '\n';
    }
    return out.str();
}

MCConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        throw DataError(std::string("run config: invalid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw DataError("run config: top level must be an object");
    reject_unknown_keys(j, {"dgp", "replications", "alpha", "master_seed", "methods", "gamma"},
                        "run config");

    MCConfig cfg;
    if (j.contains("dgp")) {
        const json& d = j["dgp"];
        if (!d.is_object()) throw DataError("run config: 'dgp' must be an object");
        reject_unknown_keys(d,
                            {"n", "K", "rho", "mu2", "sparsity", "a0", "sigma_eps2", "sigma_v2",
                             "eta_corr", "beta", "beta0"},
                            "run config dgp");
        if (d.contains("n")) cfg.dgp.n = d["n"].get<int>();
        if (d.contains("K")) cfg.dgp.num_instruments = d["K"].get<int>();
        if (d.contains("rho")) cfg.dgp.rho = d["rho"].get<double>();
        if (d.contains("mu2")) cfg.dgp.mu2 = d["mu2"].get<double>();
        if (d.contains("sparsity")) {
            const json& s = d["sparsity"];
            if (!s.is_object()) throw DataError("run config: 'sparsity' must be an object");
            reject_unknown_keys(s, {"kind", "q"}, "run config sparsity");
            if (s.contains("kind")) {
                const std::string kind = s["kind"].get<std::string>();
                if (kind == "sparse") {
                    cfg.dgp.sparsity.kind = SparsityKind::Sparse;
                } else if (kind == "dense") {
                    cfg.dgp.sparsity.kind = SparsityKind::Dense;
                } else {
                    throw DataError("run config: sparsity kind must be 'sparse' or 'dense'");
                }
            }
            if (s.contains("q")) cfg.dgp.sparsity.q = s["q"].get<int>();
        }
        if (d.contains("a0")) cfg.dgp.a0 = d["a0"].get<double>();
        if (d.contains("sigma_eps2")) cfg.dgp.sigma_eps2 = d["sigma_eps2"].get<double>();
        if (d.contains("sigma_v2")) cfg.dgp.sigma_v2 = d["sigma_v2"].get<double>();
        if (d.contains("eta_corr")) cfg.dgp.eta_corr = d["eta_corr"].get<double>();
        if (d.contains("beta")) cfg.dgp.beta = d["beta"].get<double>();
        if (d.contains("beta0")) cfg.dgp.beta0 = d["beta0"].get<double>();
    }
    if (j.contains("replications")) cfg.replications = j["replications"].get<int>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : j["methods"]) {
            const auto m = method_from_name(name.get<std::string>());
            if (!m) throw DataError("run config: unknown method '" + name.get<std::string>() + "'");
            cfg.methods.push_back(*m);
        }
    }
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    return cfg;
}

MCConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string run_config_json(const MCConfig& cfg) {
    json methods = json::array();
    for (Method m : cfg.methods) methods.push_back(method_name(m));
    json j;
    j["dgp"] = {{"n", cfg.dgp.n},
                {"K", cfg.dgp.num_instruments},
                {"rho", cfg.dgp.rho},
                {"mu2", cfg.dgp.mu2},
                {"sparsity", sparsity_to_json(cfg.dgp.sparsity)},
                {"a0", cfg.dgp.a0},
                {"sigma_eps2", cfg.dgp.sigma_eps2},
                {"sigma_v2", cfg.dgp.sigma_v2},
                {"eta_corr", cfg.dgp.eta_corr},
                {"beta", cfg.dgp.beta},
                {"beta0", cfg.dgp.beta0}};
    j["replications"] = cfg.replications;
    j["alpha"] = cfg.alpha;
    j["master_seed"] = cfg.master_seed;
    j["methods"] = std::move(methods);
    j["gamma"] = cfg.gamma;
    return j.dump(2) + "\n";
}

}  // namespace weakiv::io
