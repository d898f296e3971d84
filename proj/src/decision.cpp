#include "smartfog/decision.hpp"

#include "smartfog/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace smartfog {

std::string_view to_string(AreaType type) {
    return type == AreaType::ComputeOptimized ? "compute" : "memory";
}

AreaType parse_area_type(std::string_view text) {
    if (text == "compute") {
        return AreaType::ComputeOptimized;
    }
    if (text == "memory") {
        return AreaType::MemoryOptimized;
    }
    throw ConfigError("unknown area type '" + std::string(text) + "'");
}

DeviceEvaluation::DeviceEvaluation(DeviceId id, double betweenness, double mips, double cloud_latency_ms,
                                   double memory)
    : device(id),
      objectives({betweenness, mips, cloud_latency_ms}, {Sense::Maximize, Sense::Maximize, Sense::Minimize}),
      memory_gb(memory) {}

bool GatewayAssignment::is_gateway(DeviceId id) const {
    return std::any_of(gateways.begin(), gateways.end(), [id](const Gateway& g) { return g.device == id; });
}

std::vector<DeviceEvaluation> evaluate_devices(const FogOverlay& overlay, const CentralityScores& centrality) {
    const auto latency = all_latencies_to_cloud(overlay);
    std::vector<DeviceEvaluation> out;
    out.reserve(overlay.size());
    for (std::size_t i = 0; i < overlay.size(); ++i) {
        const auto& d = overlay.devices()[i];
        out.emplace_back(d.id, centrality.at(d.id), d.mips, latency[i], d.memory_gb);
    }
    return out;
}

bool ranks_before(const DeviceEvaluation& a, const DeviceEvaluation& b, AreaType priority) {
    const double ka = priority == AreaType::ComputeOptimized ? a.mips() : a.memory_gb;
    const double kb = priority == AreaType::ComputeOptimized ? b.mips() : b.memory_gb;
    if (ka != kb) {
        return ka > kb;
    }
    if (a.cloud_latency_ms() != b.cloud_latency_ms()) {
        return a.cloud_latency_ms() < b.cloud_latency_ms();
    }
    if (a.betweenness() != b.betweenness()) {
        return a.betweenness() > b.betweenness();
    }
    return raw(a.device) < raw(b.device);
}

std::vector<DeviceEvaluation> partition_front(std::span<const DeviceEvaluation> front, AreaType priority) {
    if (front.empty()) {
        throw ContractError("cannot partition an empty front");
    }
    std::vector<DeviceEvaluation> out(front.begin(), front.end());
    std::sort(out.begin(), out.end(),
              [priority](const DeviceEvaluation& a, const DeviceEvaluation& b) { return ranks_before(a, b, priority); });
    return out;
}

GatewayAssignment select_gateways(std::span<const DeviceEvaluation> evaluations, std::span<const AreaType> areas) {
    if (areas.empty()) {
        throw ContractError("at least one functional area is required");
    }
    if (areas.size() > evaluations.size()) {
        throw CapacityError("requested " + std::to_string(areas.size()) + " gateways from " +
                            std::to_string(evaluations.size()) + " devices");
    }
    std::vector<ObjectiveVector> points;
    points.reserve(evaluations.size());
    for (const auto& e : evaluations) {
        points.push_back(e.objectives);
    }
    const auto sorted = non_dominated_sort(points);

    GatewayAssignment out;
    std::set<std::size_t> taken;
    std::size_t front = 0;
    for (const auto area : areas) {
        const DeviceEvaluation* best = nullptr;
        std::size_t best_index = 0;
        while (best == nullptr) {
            for (const auto i : sorted.fronts[front]) {
                if (taken.contains(i)) {
                    continue;
                }
                if (best == nullptr || ranks_before(evaluations[i], *best, area)) {
                    best = &evaluations[i];
                    best_index = i;
                }
            }
            if (best == nullptr) {
                ++front;
            }
        }
        taken.insert(best_index);
        out.gateways.push_back({best->device, area});
    }
    return out;
}

GatewayAssignment select_gateways(const FogOverlay& overlay, std::span<const AreaType> areas,
                                  const CentralityScores& centrality) {
    if (areas.size() > overlay.size()) {
        throw CapacityError("requested " + std::to_string(areas.size()) + " gateways from " +
                            std::to_string(overlay.size()) + " devices");
    }
    const auto evaluations = evaluate_devices(overlay, centrality);
    return select_gateways(evaluations, areas);
}

std::string serialize_assignment(const GatewayAssignment& assignment) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& g : assignment.gateways) {
        doc.push_back({{"gateway", raw(g.device)}, {"area_type", to_string(g.area)}});
    }
    return doc.dump(2) + "\n";
}

} // namespace smartfog
