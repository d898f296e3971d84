#pragma once

#include "smartfog/clustering.hpp"
#include "smartfog/decision.hpp"
#include "smartfog/overlay.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smartfog {

enum class Mode { SmartFog, UnoptimizedFog };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

enum class TupleKind { SPA, PC };

// Workload and environment knobs for one simulated run. Times are in ms,
// work in millions of instructions (MI), sizes in bytes.
struct WorkloadSpec {
    // Sensor/actuator pairs: round(sensors_per_device * n), at least 1.
    double sensors_per_device = 0.25;

    double spa_interval_ms = 30000.0;
    double pc_interval_ms = 30000.0;
    double jitter = 0.2;  // each gap drawn uniform in interval * [1 - jitter, 1 + jitter]

    double spa_mi_min = 1000.0;
    double spa_mi_max = 8000.0;
    double pc_mi_min = 40000.0;
    double pc_mi_max = 40000.0;
    std::uint64_t spa_bytes = 100;
    std::uint64_t pc_bytes = 100;

    double access_latency_min_ms = 1.0;
    double access_latency_max_ms = 5.0;
    // Links between a sensor and its access fog device (sensor -> mobile -> edge gateway -> fog).
    std::uint64_t access_hops = 3;
    // Links between a cloud-attached device and the cloud (device -> proxy -> cloud).
    std::uint64_t cloud_hops = 2;
    double cloud_mips = 44800.0;

    double horizon_ms = 300000.0;
    double warmup_ms = 10000.0;

    void validate() const;
};

struct Sensor {
    std::size_t id = 0;
    DeviceId access_device{};  // fog device the sensor/actuator pair hangs off
    double access_latency_ms = 0.0;
};

// Sensors with random access devices and access latencies drawn from the spec.
std::vector<Sensor> generate_sensors(const FogOverlay& overlay, const WorkloadSpec& workload, std::uint64_t seed);

// Output of gateway selection and functional-area clustering.
struct SmartFogPlan {
    GatewayAssignment assignment;
    std::vector<FunctionalArea> areas;
};

struct PlanOptions {
    std::vector<AreaType> areas{AreaType::ComputeOptimized, AreaType::MemoryOptimized, AreaType::ComputeOptimized};
    std::size_t clusters = 3;
    CentralityMode centrality = CentralityMode::WeightedByLatency;
    SpectralOptions spectral{};
};

SmartFogPlan plan_smartfog(const FogOverlay& overlay, const PlanOptions& options, std::uint64_t seed);

struct Placement {
    std::map<std::size_t, DeviceId> edge_modules;  // sensor -> device running its SPA module
    std::map<DeviceId, DeviceId> cloud_route;      // fog device -> gateway forwarding its PC traffic
};

// SmartFog: each sensor's SPA module goes to the lowest-latency member of the
// compute-optimized areas, and every device forwards PC traffic through the
// owning gateway with the cheapest route to the cloud. Unoptimized: random
// device per sensor and a random cloud-attached forwarder per device.
Placement place_edge_ward(const FogOverlay& overlay, std::span<const Sensor> sensors, Mode mode,
                          const SmartFogPlan* plan, std::uint64_t seed);

struct KindCounters {
    std::size_t emitted = 0;
    std::size_t completed = 0;
    std::size_t dropped = 0;
    std::size_t in_flight = 0;
};

struct SimulationReport {
    Mode mode = Mode::UnoptimizedFog;
    std::size_t n_devices = 0;
    std::uint64_t seed = 0;
    WorkloadSpec workload;

    std::vector<double> spa_delays_ms;  // loops emitted after warm-up, completion order
    std::vector<double> pc_delays_ms;
    std::uint64_t network_load_bytes = 0;  // payload bytes times links traversed
    KindCounters spa;
    KindCounters pc;

    std::size_t completed() const { return spa.completed + pc.completed; }
    std::size_t dropped() const { return spa.dropped + pc.dropped; }
};

// Event-driven run. SmartFog mode requires `plan`. Deterministic per seed.
SimulationReport run_simulation(const FogOverlay& overlay, Mode mode, const WorkloadSpec& workload,
                                std::uint64_t seed, const SmartFogPlan* plan = nullptr);

// Run against a pre-built sensor set and placement (used by tests and by the
// wrapper above).
SimulationReport run_simulation(const FogOverlay& overlay, Mode mode, const WorkloadSpec& workload,
                                std::uint64_t seed, std::span<const Sensor> sensors, const Placement& placement);

// CSV row schema shared by the harness.
inline constexpr std::string_view kReportCsvHeader =
    "mode,n_devices,seed,spa_median_ms,spa_stddev,pc_median_ms,pc_stddev,network_load_bytes,completed,dropped";

std::string report_csv_row(const SimulationReport& report);

} // namespace smartfog
