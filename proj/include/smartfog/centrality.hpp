#pragma once

#include "smartfog/overlay.hpp"

#include <map>

namespace smartfog {

enum class CentralityMode { Unweighted, WeightedByLatency };

// Two weighted path lengths closer than this are treated as equal.
inline constexpr double kPathTieTolerance = 1e-12;

struct CentralityScores {
    std::map<DeviceId, double> scores;
    CentralityMode mode = CentralityMode::WeightedByLatency;

    double at(DeviceId id) const;
};

// Raw betweenness over unordered endpoint pairs {s, d} with s != n != d:
//   g(n) = sum sigma_sd(n) / sigma_sd
// Unweighted mode counts hops; weighted mode uses summed link latency.
// Throws TopologyError on a disconnected graph.
CentralityScores betweenness(const FogOverlay& overlay, CentralityMode mode = CentralityMode::WeightedByLatency);

// Same computation on a bare adjacency structure, indexed by vertex.
std::vector<double> betweenness(const std::vector<std::vector<Neighbor>>& adjacency, CentralityMode mode);

} // namespace smartfog
