#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weakiv/inference.hpp"
#include "weakiv/simulation.hpp"

namespace weakiv::io {

struct LoadOptions {
    bool center = true;         // subtract column means of X and of each Z column
    std::string z_prefix = "Z";
};

struct LoadReport {
    double x_shift = 0.0;
    std::vector<double> z_shifts;
    std::vector<std::string> warnings;
};

struct LoadedDataset {
    Dataset data;
    LoadReport report;
};

/// Reads a delimited text file (comma separator, dot decimal, header row) with
/// columns Y, X, and <prefix>1..<prefix>K. Throws ParseError /
/// MissingColumnError / NonFiniteValueError with file locations.
LoadedDataset load_dataset(const std::string& path, const LoadOptions& options = {});

/// Same parser on an already-open stream; display_name only labels errors.
LoadedDataset parse_dataset_csv(std::istream& in, const LoadOptions& options,
                                const std::string& display_name = "<stream>");

// ---------------------------------------------------------------------------
// Machine-readable records. The CLI emits exactly these bytes, so a library
// call and the corresponding CLI output compare equal.
// ---------------------------------------------------------------------------

std::string test_result_json(const TestResult& result);
std::string confidence_set_json(const ConfidenceSet& cs);

/// Per-point decision table: beta0, status, statistic, p_value (NA when the
/// point is undefined).
std::string confidence_set_csv(const ConfidenceSet& cs);

std::string rejection_table_csv(const RejectionTable& table);

/// Inverse of rejection_table_csv; numeric fields round-trip exactly.
RejectionTable parse_rejection_table_csv(const std::string& text);

std::string timing_table_csv(const std::vector<TimingRow>& rows);
std::string critical_value_csv(const std::vector<CriticalValueRow>& rows);

// ---------------------------------------------------------------------------
// Simulation run configuration (JSON mirroring MCConfig). Unknown keys are
// rejected; parse followed by serialize is idempotent.
// ---------------------------------------------------------------------------

MCConfig parse_run_config(const std::string& json_text);
MCConfig load_run_config(const std::string& path);
std::string run_config_json(const MCConfig& cfg);

}  // namespace weakiv::io
