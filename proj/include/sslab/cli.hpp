#pragma once

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sslab::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Every option of every command. Flags and config-file keys share these names.
struct RunConfig {
    double alpha = 2.0 / 3.0;
    std::string blowup;               ///< empty: all ones of length `level`
    int level = 0;
    double window_lo = -100.0;
    double window_hi = 0.0;
    double tol = 1e-10;
    int max_iter = 200;
    double escape_radius = 1e8;
    std::string out;                  ///< empty: stdout
    std::string format;               ///< csv | json; empty picks the command default
    unsigned jobs = 1;
    std::uint64_t seed = 20240601;
    int resolution = 8;               ///< oracle depth beyond the level
    int points = 50;                  ///< ids grid size
    std::string boundary = "neumann";
    std::string alphas = "0.25,1/3,0.45,0.55,2/3,0.75";
    bool mirror = false;
    double x_lo = -3.0, x_hi = 3.0, y_lo = -3.0, y_hi = 3.0;
    int grid = 101;                   ///< plane grid per axis
    bool timing = false;              ///< put per-check timings into the verify report
    bool inject_fault = false;        ///< test hook: verify sees delta corrupted by 1e-3
};

/// Canonical "key=value" lines (sorted keys, %.17g numbers) minus output-only keys.
std::string canonical(const RunConfig& config);

/// 64-bit FNV-1a of canonical(config), as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Throws DomainError on values no command accepts.
void validate(const RunConfig& config);

/// Parses "0.25,1/3,0.45" (fractions allowed).
std::vector<double> parse_alpha_list(const std::string& text);

/// Tabular result plus provenance.
struct ResultRecord {
    std::string command;
    RunConfig config;
    std::vector<std::string> columns;
    std::vector<nlohmann::json> rows;          ///< arrays aligned with columns
    std::vector<std::string> notes;
    nlohmann::json extra = nlohmann::json::object();
    bool check_failed = false;                 ///< verify: some check failed
    std::vector<std::string> diagnostics;      ///< stderr lines, never rendered
};

std::string to_csv(const ResultRecord& record);
std::string to_json(const ResultRecord& record);
/// Writes in the requested (or default) format.
std::string render(const ResultRecord& record);

ResultRecord cmd_spectrum(const RunConfig& config);
ResultRecord cmd_ids(const RunConfig& config);
ResultRecord cmd_plane(const RunConfig& config);
ResultRecord cmd_verify(const RunConfig& config);
ResultRecord cmd_dichotomy(const RunConfig& config);

/// Full command-line entry point. Exit codes: 0 ok, 1 check failure,
/// 2 usage error, 3 numerical non-convergence.
int run(int argc, const char* const* argv);

} // namespace sslab::cli
