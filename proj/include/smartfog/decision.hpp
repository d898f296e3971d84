#pragma once

#include "smartfog/centrality.hpp"
#include "smartfog/overlay.hpp"
#include "smartfog/pareto.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace smartfog {

enum class AreaType { ComputeOptimized, MemoryOptimized };

std::string_view to_string(AreaType type);
AreaType parse_area_type(std::string_view text);

// Objectives, in order: betweenness (max), MIPS (max), latency to cloud (min).
// Memory rides along for the memory-optimized priority order.
struct DeviceEvaluation {
    DeviceId device{};
    ObjectiveVector objectives;
    double memory_gb = 0.0;

    DeviceEvaluation(DeviceId id, double betweenness, double mips, double cloud_latency_ms, double memory);

    double betweenness() const { return objectives[0]; }
    double mips() const { return objectives[1]; }
    double cloud_latency_ms() const { return objectives[2]; }
};

struct Gateway {
    DeviceId device{};
    AreaType area = AreaType::ComputeOptimized;

    friend bool operator==(const Gateway&, const Gateway&) = default;
};

struct GatewayAssignment {
    std::vector<Gateway> gateways;

    bool is_gateway(DeviceId id) const;

    friend bool operator==(const GatewayAssignment&, const GatewayAssignment&) = default;
};

// One evaluation per device, in device order. Throws ContractError if the
// scores do not cover every device.
std::vector<DeviceEvaluation> evaluate_devices(const FogOverlay& overlay, const CentralityScores& centrality);

// Strict weak ordering used to rank a front for an area type: priority key
// descending (MIPS or memory), then lower cloud latency, higher betweenness,
// lower device id.
bool ranks_before(const DeviceEvaluation& a, const DeviceEvaluation& b, AreaType priority);

// Sorted copy of `front`, best first. Throws ContractError on an empty front.
std::vector<DeviceEvaluation> partition_front(std::span<const DeviceEvaluation> front, AreaType priority);

// Areas claim devices in input order. Each area takes the best remaining
// member of the shallowest front that still has unclaimed devices.
GatewayAssignment select_gateways(std::span<const DeviceEvaluation> evaluations, std::span<const AreaType> areas);

// Full pipeline from the overlay: evaluate, sort, decide.
GatewayAssignment select_gateways(const FogOverlay& overlay, std::span<const AreaType> areas,
                                  const CentralityScores& centrality);

std::string serialize_assignment(const GatewayAssignment& assignment);

} // namespace smartfog
