#pragma once

#include "smartfog/overlay.hpp"
#include "smartfog/simulation.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace smartfog {

struct ExperimentConfig {
    std::vector<std::size_t> overlay_sizes{20, 30, 40};
    std::vector<Mode> modes{Mode::SmartFog, Mode::UnoptimizedFog};
    std::size_t replications = 100;
    std::uint64_t seed_base = 1;
    OverlayParams overlay{};
    WorkloadSpec workload{};
    PlanOptions plan{};
    std::filesystem::path output_dir = "results";
    std::size_t threads = 0;  // 0: hardware concurrency

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Replication r runs with seed_base + r.
    std::uint64_t seed_for(std::size_t replication) const { return seed_base + replication; }
};

// JSON config document; absent keys keep their defaults.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunRow {
    Mode mode = Mode::SmartFog;
    std::size_t n_devices = 0;
    std::uint64_t seed = 0;
    double spa_median_ms = 0.0;
    double spa_stddev_ms = 0.0;
    double pc_median_ms = 0.0;
    double pc_stddev_ms = 0.0;
    std::uint64_t network_load_bytes = 0;
    std::size_t completed = 0;
    std::size_t dropped = 0;
};

RunRow summarize_report(const SimulationReport& report);

struct CellSummary {
    Mode mode = Mode::SmartFog;
    std::size_t n_devices = 0;
    std::size_t runs = 0;
    double spa_median_ms = 0.0;
    double spa_stddev_ms = 0.0;
    double pc_median_ms = 0.0;
    double pc_stddev_ms = 0.0;
    double network_load_median_bytes = 0.0;
    double network_load_stddev_bytes = 0.0;
};

// Median and standard deviation across runs, one cell per (size, mode) in
// first-seen order.
std::vector<CellSummary> summarize_cells(const std::vector<RunRow>& rows);

// One simulated replication, including the SmartFog planning stages when needed.
SimulationReport run_replication(const ExperimentConfig& config, std::size_t n_devices, Mode mode,
                                 std::size_t replication);

// Rows ordered by (size, mode, replication) regardless of worker scheduling.
std::vector<RunRow> run_replications(const ExperimentConfig& config);

struct ExperimentOutput {
    std::vector<RunRow> rows;
    std::vector<CellSummary> summary;
    std::filesystem::path results_csv;
    std::filesystem::path summary_csv;
};

// Runs every replication and writes results.csv and summary.csv into
// config.output_dir. Throws IoError when the files cannot be written.
ExperimentOutput run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kSummaryCsvHeader =
    "mode,n_devices,runs,spa_median_ms,spa_stddev_ms,pc_median_ms,pc_stddev_ms,network_load_median_bytes,"
    "network_load_stddev_bytes";

std::string format_row(const RunRow& row);
std::string format_summary(const CellSummary& cell);
RunRow parse_row(std::string_view line);

// Wall-clock milliseconds per algorithm stage.
struct StageTimings {
    double betweenness_ms = 0.0;
    double decision_ms = 0.0;  // evaluation + non-dominated sorting + decision, centrality excluded
    double clustering_ms = 0.0;
};

StageTimings time_stages(const FogOverlay& overlay, const PlanOptions& plan, std::uint64_t seed);

struct TimingRow {
    std::size_t n_devices = 0;
    std::uint64_t seed = 0;
    StageTimings timings;
};

struct TimingSummary {
    std::size_t n_devices = 0;
    std::size_t runs = 0;
    StageTimings median;
    StageTimings stddev;
};

struct TimingOutput {
    std::vector<TimingRow> rows;
    std::vector<TimingSummary> summary;
};

// Algorithm stages only, no simulation. Runs sequentially so the
// measurements do not compete for cores.
TimingOutput timing_report(const ExperimentConfig& config);

// Writes timing.csv and timing_summary.csv into config.output_dir.
void write_timing(const ExperimentConfig& config, const TimingOutput& output);

} // namespace smartfog
