#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "weakiv/statistics.hpp"

namespace weakiv {

/// Uniform candidate grid for test inversion, inclusive of both endpoints.
struct GridSpec {
    double lo = -5.0;
    double hi = 5.0;
    int num_points = 100;

    void validate() const;
    double spacing() const { return (hi - lo) / (num_points - 1); }
    std::vector<double> points() const;
};

enum class PointStatus { Accepted, Rejected, Undefined };

const char* point_status_name(PointStatus s);

/// Result of inverting a test over a grid of candidate beta0 values. Points
/// where the statistic is degenerate are included in the set (a test that
/// cannot reject must not shrink it) and listed in undefined_points.
struct ConfidenceSet {
    Method method = Method::Jar;
    double alpha = 0.05;
    std::vector<double> grid;
    std::vector<PointStatus> status;
    std::vector<bool> accepted;      // Accepted or Undefined
    std::vector<double> statistics;  // NaN where undefined
    std::vector<double> p_values;    // NaN where undefined
    std::vector<std::pair<double, double>> intervals;  // maximal accepted runs
    std::vector<double> undefined_points;
    double total_length = 0.0;  // accepted point count times grid spacing
};

/// Single test of beta = beta0. Thin, stable wrapper over run_test.
TestResult test_at(const Dataset& data, double beta0, Method method, double alpha,
                   std::optional<double> gamma = std::nullopt);

/// Grid inversion: the confidence set collects every candidate the test does
/// not reject at level alpha.
ConfidenceSet invert(const Dataset& data, const GridSpec& grid, Method method, double alpha,
                     std::optional<double> gamma = std::nullopt);

}  // namespace weakiv
