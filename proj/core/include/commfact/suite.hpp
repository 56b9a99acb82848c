#pragma once

// Seeded experiment sweeps that produce VerificationReport bundles.

#include "commfact/harness.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace commfact {

inline constexpr Index kSuiteMaxNCap = 512;

/// Suite names accepted by run_suite, "all" last.
const std::vector<std::string>& suite_names();

struct SuiteConfig {
    std::string suite;
    std::uint64_t seed = 7;
    Index max_n = 16;
    /// Cases per sub-suite; 0 selects each sub-suite's default.
    std::size_t cases = 0;
    /// Worker threads; 0 reads COMMFACT_THREADS.
    std::size_t threads = 0;
};

struct SummaryRow {
    std::string suite;
    std::size_t cases = 0;
    std::size_t passed = 0;
    double max_residual_rel = 0.0;
    double max_norm_ratio = 0.0;  ///< max norm_product / input_norm
    double max_commutator_trace_ratio = 0.0;  ///< max commutator_trace / norm_product
};

struct SuiteResult {
    SuiteConfig config;
    std::vector<VerificationReport> reports;  ///< ordered by case index
    std::vector<SummaryRow> summary;
    bool all_pass = false;
};

/// Throws InvalidArgument for an unknown or empty suite name and
/// CapExceeded when max_n exceeds kSuiteMaxNCap.
SuiteResult run_suite(const SuiteConfig& config);

struct ReportBundle {
    std::string header_json;  ///< the only part that carries a timestamp
    std::string reports_jsonl;
    std::string summary_csv;
};

ReportBundle make_bundle(const SuiteResult& result, const std::string& timestamp);
/// Writes header.json, reports.jsonl and summary.csv into `dir` (created if needed).
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);
/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace commfact
