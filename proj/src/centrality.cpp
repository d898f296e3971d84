#include "smartfog/centrality.hpp"

#include "smartfog/error.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace smartfog {

double CentralityScores::at(DeviceId id) const {
    auto it = scores.find(id);
    if (it == scores.end()) {
        throw ContractError("no centrality score for device " + std::to_string(raw(id)));
    }
    return it->second;
}

namespace {

struct SourceState {
    std::vector<double> sigma;
    std::vector<double> delta;
    std::vector<double> distance;
    std::vector<std::vector<std::size_t>> preds;
    std::vector<std::size_t> order;  // vertices in non-decreasing distance

    explicit SourceState(std::size_t n) : sigma(n), delta(n), distance(n), preds(n) { order.reserve(n); }

    void reset() {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        for (auto& p : preds) {
            p.clear();
        }
        order.clear();
    }
};

void count_paths_bfs(const std::vector<std::vector<Neighbor>>& adj, std::size_t s, SourceState& st) {
    st.distance[s] = 0.0;
    st.sigma[s] = 1.0;
    std::queue<std::size_t> queue;
    queue.push(s);
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop();
        st.order.push_back(v);
        for (const auto& nb : adj[v]) {
            const auto w = nb.index;
            if (std::isinf(st.distance[w])) {
                st.distance[w] = st.distance[v] + 1.0;
                queue.push(w);
            }
            if (st.distance[w] == st.distance[v] + 1.0) {
                st.sigma[w] += st.sigma[v];
                st.preds[w].push_back(v);
            }
        }
    }
}

void count_paths_dijkstra(const std::vector<std::vector<Neighbor>>& adj, std::size_t s, SourceState& st) {
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    std::vector<bool> settled(adj.size(), false);
    st.distance[s] = 0.0;
    st.sigma[s] = 1.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (settled[v]) {
            continue;
        }
        settled[v] = true;
        st.order.push_back(v);
        for (const auto& nb : adj[v]) {
            const auto w = nb.index;
            if (settled[w]) {
                continue;
            }
            const double candidate = d + nb.latency_ms;
            if (candidate < st.distance[w] - kPathTieTolerance) {
                st.distance[w] = candidate;
                st.sigma[w] = st.sigma[v];
                st.preds[w].assign(1, v);
                heap.emplace(candidate, w);
            } else if (std::abs(candidate - st.distance[w]) <= kPathTieTolerance) {
                st.sigma[w] += st.sigma[v];
                st.preds[w].push_back(v);
            }
        }
    }
}

} // namespace

std::vector<double> betweenness(const std::vector<std::vector<Neighbor>>& adjacency, CentralityMode mode) {
    const std::size_t n = adjacency.size();
    if (!is_connected(adjacency)) {
        throw TopologyError("betweenness requires a connected overlay");
    }
    std::vector<double> score(n, 0.0);
    SourceState st(n);
    for (std::size_t s = 0; s < n; ++s) {
        st.reset();
        if (mode == CentralityMode::Unweighted) {
            count_paths_bfs(adjacency, s, st);
        } else {
            count_paths_dijkstra(adjacency, s, st);
        }
        // Dependency accumulation in reverse distance order.
        for (auto it = st.order.rbegin(); it != st.order.rend(); ++it) {
            const auto w = *it;
            for (const auto v : st.preds[w]) {
                st.delta[v] += st.sigma[v] / st.sigma[w] * (1.0 + st.delta[w]);
            }
            if (w != s) {
                score[w] += st.delta[w];
            }
        }
    }
    // Every unordered pair was visited from both endpoints.
    for (auto& g : score) {
        g *= 0.5;
    }
    return score;
}

CentralityScores betweenness(const FogOverlay& overlay, CentralityMode mode) {
    const auto values = betweenness(overlay.adjacency(), mode);
    CentralityScores out;
    out.mode = mode;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.scores.emplace(overlay.id_at(i), values[i]);
    }
    return out;
}

} // namespace smartfog
