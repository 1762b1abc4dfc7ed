#include "weakiv/inference.hpp"

#include <cmath>
#include <limits>

namespace weakiv {

void GridSpec::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi) {
        throw InvalidInput("grid requires finite lo < hi");
    }
    if (num_points < 2) {
        throw InvalidInput("grid needs at least 2 points");
    }
}

std::vector<double> GridSpec::points() const {
    validate();
    std::vector<double> pts(static_cast<std::size_t>(num_points));
    const double step = spacing();
    for (int i = 0; i < num_points; ++i) {
        pts[static_cast<std::size_t>(i)] = (i == num_points - 1) ? hi : lo + i * step;
    }
    return pts;
}

const char* point_status_name(PointStatus s) {
    switch (s) {
        case PointStatus::Accepted: return "accepted";
        case PointStatus::Rejected: return "rejected";
        case PointStatus::Undefined: return "undefined";
    }
    return "?";
}

TestResult test_at(const Dataset& data, double beta0, Method method, double alpha,
                   std::optional<double> gamma) {
    return run_test(data, beta0, method, alpha, gamma);
}

ConfidenceSet invert(const Dataset& data, const GridSpec& grid, Method method, double alpha,
                     std::optional<double> gamma) {
    grid.validate();
    data.validate();

    ConfidenceSet cs;
    cs.method = method;
    cs.alpha = alpha;
    cs.grid = grid.points();
    const std::size_t m = cs.grid.size();
    cs.status.resize(m);
    cs.accepted.resize(m);
    cs.statistics.assign(m, std::numeric_limits<double>::quiet_NaN());
    cs.p_values.assign(m, std::numeric_limits<double>::quiet_NaN());

    for (std::size_t i = 0; i < m; ++i) {
        try {
            const TestResult r = test_at(data, cs.grid[i], method, alpha, gamma);
            cs.statistics[i] = r.statistic;
            cs.p_values[i] = r.p_value;
            cs.status[i] = r.reject ? PointStatus::Rejected : PointStatus::Accepted;
        } catch (const StatisticUndefined&) {
            cs.status[i] = PointStatus::Undefined;
            cs.undefined_points.push_back(cs.grid[i]);
        }
        cs.accepted[i] = cs.status[i] != PointStatus::Rejected;
    }

    std::size_t accepted_count = 0;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (cs.accepted[i]) {
            ++accepted_count;
            if (!in_run) {
                in_run = true;
                run_start = i;
            }
        } else if (in_run) {
            cs.intervals.emplace_back(cs.grid[run_start], cs.grid[i - 1]);
            in_run = false;
        }
    }
    if (in_run) {
        cs.intervals.emplace_back(cs.grid[run_start], cs.grid[m - 1]);
    }
    cs.total_length = static_cast<double>(accepted_count) * grid.spacing();
    return cs;
}

}  // namespace weakiv
