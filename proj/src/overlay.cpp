#include "smartfog/overlay.hpp"

#include "smartfog/error.hpp"
#include "smartfog/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace smartfog {

namespace {

std::string id_text(DeviceId id) { return std::to_string(raw(id)); }

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

std::string_view to_string(Arch arch) { return arch == Arch::ARM ? "ARM" : "X86"; }

Arch parse_arch(std::string_view text) {
    if (text == "ARM") {
        return Arch::ARM;
    }
    if (text == "X86") {
        return Arch::X86;
    }
    throw ConfigError("unknown architecture '" + std::string(text) + "'");
}

FogOverlay::FogOverlay(std::vector<FogDevice> devices, std::vector<Link> links,
                       std::map<DeviceId, double> cloud_latency_ms)
    : devices_(std::move(devices)), links_(std::move(links)), cloud_(std::move(cloud_latency_ms)) {
    std::sort(devices_.begin(), devices_.end(),
              [](const FogDevice& x, const FogDevice& y) { return raw(x.id) < raw(y.id); });
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        const auto& d = devices_[i];
        if (i > 0 && devices_[i - 1].id == d.id) {
            throw ConflictError("duplicate device id " + id_text(d.id));
        }
        if (!positive_finite(d.mips) || !positive_finite(d.memory_gb) || !std::isfinite(d.storage_gb) ||
            d.storage_gb < 0.0) {
            throw ContractError("device " + id_text(d.id) + " has invalid capacities");
        }
    }

    for (auto& link : links_) {
        if (raw(link.b) < raw(link.a)) {
            std::swap(link.a, link.b);
        }
        if (link.a == link.b) {
            throw TopologyError("self-loop on device " + id_text(link.a));
        }
        if (!contains(link.a) || !contains(link.b)) {
            throw ContractError("link references unknown device");
        }
        if (!positive_finite(link.latency_ms)) {
            throw ContractError("link latency must be positive");
        }
    }
    std::sort(links_.begin(), links_.end(), [](const Link& x, const Link& y) {
        return std::pair(raw(x.a), raw(x.b)) < std::pair(raw(y.a), raw(y.b));
    });
    for (std::size_t i = 1; i < links_.size(); ++i) {
        if (links_[i - 1].a == links_[i].a && links_[i - 1].b == links_[i].b) {
            throw TopologyError("parallel links between " + id_text(links_[i].a) + " and " + id_text(links_[i].b));
        }
    }

    for (const auto& [id, latency] : cloud_) {
        if (!contains(id)) {
            throw ContractError("cloud attachment for unknown device " + id_text(id));
        }
        if (!positive_finite(latency)) {
            throw ContractError("cloud latency must be positive");
        }
    }
    if (cloud_.empty()) {
        throw TopologyError("overlay has no cloud-attached device");
    }

    adjacency_.assign(devices_.size(), {});
    for (const auto& link : links_) {
        const auto ia = index_of(link.a);
        const auto ib = index_of(link.b);
        adjacency_[ia].push_back({ib, link.latency_ms});
        adjacency_[ib].push_back({ia, link.latency_ms});
    }
    if (!is_connected(adjacency_)) {
        throw TopologyError("overlay is disconnected");
    }
}

bool FogOverlay::contains(DeviceId id) const {
    return std::binary_search(devices_.begin(), devices_.end(), FogDevice{.id = id},
                              [](const FogDevice& x, const FogDevice& y) { return raw(x.id) < raw(y.id); });
}

std::size_t FogOverlay::index_of(DeviceId id) const {
    auto it = std::lower_bound(devices_.begin(), devices_.end(), id,
                               [](const FogDevice& d, DeviceId key) { return raw(d.id) < raw(key); });
    if (it == devices_.end() || it->id != id) {
        throw ContractError("unknown device " + id_text(id));
    }
    return static_cast<std::size_t>(it - devices_.begin());
}

std::optional<double> FogOverlay::link_latency(DeviceId a, DeviceId b) const {
    if (raw(b) < raw(a)) {
        std::swap(a, b);
    }
    auto it = std::lower_bound(links_.begin(), links_.end(), std::pair(raw(a), raw(b)),
                               [](const Link& l, const std::pair<std::uint32_t, std::uint32_t>& key) {
                                   return std::pair(raw(l.a), raw(l.b)) < key;
                               });
    if (it == links_.end() || it->a != a || it->b != b) {
        return std::nullopt;
    }
    return it->latency_ms;
}

std::optional<double> FogOverlay::cloud_latency_of(DeviceId id) const {
    auto it = cloud_.find(id);
    if (it == cloud_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool is_connected(const std::vector<std::vector<Neighbor>>& adjacency) {
    if (adjacency.empty()) {
        return true;
    }
    std::vector<bool> seen(adjacency.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto& nb : adjacency[v]) {
            if (!seen[nb.index]) {
                seen[nb.index] = true;
                ++reached;
                stack.push_back(nb.index);
            }
        }
    }
    return reached == adjacency.size();
}

void OverlayParams::validate() const {
    auto fail = [](const std::string& field) { throw ConfigError("invalid overlay parameter: " + field); };
    if (!positive_finite(mips_min) || !std::isfinite(mips_max) || mips_max < mips_min) {
        fail("mips range");
    }
    if (memory_min_gb < 1 || memory_max_gb < memory_min_gb) {
        fail("memory range");
    }
    if (!std::isfinite(storage_gb) || storage_gb < 0.0) {
        fail("storage_gb");
    }
    if (!std::isfinite(mean_degree) || mean_degree < 0.0) {
        fail("mean_degree");
    }
    if (!positive_finite(latency_min_ms) || !std::isfinite(latency_max_ms) || latency_max_ms < latency_min_ms) {
        fail("latency range");
    }
    if (!positive_finite(cloud_latency_min_ms) || !std::isfinite(cloud_latency_max_ms) ||
        cloud_latency_max_ms < cloud_latency_min_ms) {
        fail("cloud latency range");
    }
    if (!(cloud_attach_fraction >= 0.0 && cloud_attach_fraction <= 1.0)) {
        fail("cloud_attach_fraction");
    }
}

namespace {

FogDevice random_device(DeviceId id, Rng& rng, const OverlayParams& params) {
    FogDevice d;
    d.id = id;
    d.mips = rng.uniform(params.mips_min, params.mips_max);
    d.memory_gb = static_cast<double>(rng.uniform_int(static_cast<std::uint64_t>(params.memory_min_gb),
                                                      static_cast<std::uint64_t>(params.memory_max_gb)));
    d.storage_gb = params.storage_gb;
    d.arch = rng.bernoulli(0.5) ? Arch::ARM : Arch::X86;
    return d;
}

// Decodes a uniformly random Pruefer sequence into the edges of a labelled tree.
std::vector<std::pair<std::size_t, std::size_t>> random_tree(std::size_t n, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    if (n < 2) {
        return edges;
    }
    std::vector<std::size_t> code(n - 2);
    for (auto& c : code) {
        c = rng.index(n);
    }
    std::vector<std::size_t> degree(n, 1);
    for (auto c : code) {
        ++degree[c];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
    for (std::size_t v = 0; v < n; ++v) {
        if (degree[v] == 1) {
            leaves.push(v);
        }
    }
    for (auto c : code) {
        const auto leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(leaf, c);
        if (--degree[c] == 1) {
            leaves.push(c);
        }
    }
    const auto u = leaves.top();
    leaves.pop();
    const auto v = leaves.top();
    edges.emplace_back(u, v);
    return edges;
}

} // namespace

FogOverlay build_overlay(std::size_t n_devices, std::uint64_t seed, const OverlayParams& params) {
    if (n_devices < 2) {
        throw ConfigError("overlay needs at least 2 devices");
    }
    params.validate();
    Rng rng(seed);

    std::vector<FogDevice> devices;
    devices.reserve(n_devices);
    for (std::size_t i = 0; i < n_devices; ++i) {
        devices.push_back(random_device(DeviceId{static_cast<std::uint32_t>(i)}, rng, params));
    }

    auto edges = random_tree(n_devices, rng);
    std::set<std::pair<std::size_t, std::size_t>> present;
    for (auto& [a, b] : edges) {
        if (b < a) {
            std::swap(a, b);
        }
        present.emplace(a, b);
    }

    const std::size_t max_edges = n_devices * (n_devices - 1) / 2;
    const auto wanted = static_cast<std::size_t>(std::llround(params.mean_degree * static_cast<double>(n_devices) / 2.0));
    const std::size_t target = std::clamp(wanted, n_devices - 1, max_edges);
    if (target > edges.size()) {
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        candidates.reserve(max_edges - edges.size());
        for (std::size_t a = 0; a < n_devices; ++a) {
            for (std::size_t b = a + 1; b < n_devices; ++b) {
                if (!present.contains({a, b})) {
                    candidates.emplace_back(a, b);
                }
            }
        }
        const std::size_t extra = target - edges.size();
        for (std::size_t i = 0; i < extra; ++i) {
            const auto j = i + rng.index(candidates.size() - i);
            std::swap(candidates[i], candidates[j]);
            edges.push_back(candidates[i]);
        }
    }
    std::sort(edges.begin(), edges.end());

    std::vector<Link> links;
    links.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        links.push_back({devices[a].id, devices[b].id, rng.uniform(params.latency_min_ms, params.latency_max_ms)});
    }

    std::map<DeviceId, double> cloud;
    for (const auto& d : devices) {
        if (params.cloud_attach_fraction >= 1.0 || rng.bernoulli(params.cloud_attach_fraction)) {
            cloud[d.id] = rng.uniform(params.cloud_latency_min_ms, params.cloud_latency_max_ms);
        }
    }
    if (cloud.empty()) {
        const auto& d = devices[rng.index(devices.size())];
        cloud[d.id] = rng.uniform(params.cloud_latency_min_ms, params.cloud_latency_max_ms);
    }

    return FogOverlay(std::move(devices), std::move(links), std::move(cloud));
}

FogOverlay apply_churn(const FogOverlay& overlay, const ChurnEvent& event) {
    std::vector<FogDevice> devices(overlay.devices().begin(), overlay.devices().end());
    std::vector<Link> links(overlay.links().begin(), overlay.links().end());
    auto cloud = overlay.cloud_latency();

    if (const auto* join = std::get_if<JoinEvent>(&event.kind)) {
        const auto id = join->device.id;
        if (overlay.contains(id)) {
            throw ConflictError("device " + id_text(id) + " already in overlay");
        }
        if (join->links.empty()) {
            throw ChurnRejected("joining device " + id_text(id) + " has no attachment links");
        }
        std::set<std::uint32_t> peers;
        for (const auto& l : join->links) {
            if (!overlay.contains(l.peer)) {
                throw ContractError("join links to unknown device " + id_text(l.peer));
            }
            if (!peers.insert(raw(l.peer)).second) {
                throw ContractError("join lists peer " + id_text(l.peer) + " twice");
            }
            links.push_back({id, l.peer, l.latency_ms});
        }
        devices.push_back(join->device);
        if (join->cloud_latency_ms) {
            cloud[id] = *join->cloud_latency_ms;
        }
        return FogOverlay(std::move(devices), std::move(links), std::move(cloud));
    }

    const auto id = std::get<LeaveEvent>(event.kind).device;
    if (!overlay.contains(id)) {
        throw ContractError("leaving device " + id_text(id) + " not in overlay");
    }
    if (overlay.size() == 1) {
        throw ChurnRejected("last device cannot leave");
    }
    std::erase_if(devices, [id](const FogDevice& d) { return d.id == id; });
    std::erase_if(links, [id](const Link& l) { return l.a == id || l.b == id; });
    cloud.erase(id);
    if (cloud.empty()) {
        throw ChurnRejected("device " + id_text(id) + " is the last cloud-attached device");
    }
    try {
        return FogOverlay(std::move(devices), std::move(links), std::move(cloud));
    } catch (const TopologyError&) {
        throw ChurnRejected("removing device " + id_text(id) + " disconnects the overlay");
    }
}

std::vector<bool> articulation_points(const std::vector<std::vector<Neighbor>>& adjacency) {
    const std::size_t n = adjacency.size();
    std::vector<bool> cut(n, false);
    std::vector<std::size_t> disc(n, 0), low(n, 0), parent(n, n), child_count(n, 0), next_edge(n, 0);
    std::size_t timer = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (disc[root] != 0) {
            continue;
        }
        // Iterative Tarjan DFS.
        std::vector<std::size_t> stack{root};
        disc[root] = low[root] = ++timer;
        while (!stack.empty()) {
            const auto v = stack.back();
            if (next_edge[v] < adjacency[v].size()) {
                const auto w = adjacency[v][next_edge[v]++].index;
                if (disc[w] == 0) {
                    parent[w] = v;
                    ++child_count[v];
                    disc[w] = low[w] = ++timer;
                    stack.push_back(w);
                } else if (w != parent[v]) {
                    low[v] = std::min(low[v], disc[w]);
                }
            } else {
                stack.pop_back();
                const auto p = parent[v];
                if (p != n) {
                    low[p] = std::min(low[p], low[v]);
                    if (parent[p] != n && low[v] >= disc[p]) {
                        cut[p] = true;
                    }
                }
            }
        }
        cut[root] = child_count[root] > 1;
    }
    return cut;
}

std::vector<ChurnEvent> generate_churn(const FogOverlay& overlay, std::size_t n_events, std::uint64_t seed,
                                       const ChurnParams& params) {
    params.device_params.validate();
    if (params.join_links == 0) {
        throw ConfigError("invalid churn parameter: join_links");
    }
    if (!positive_finite(params.mean_interval_ms)) {
        throw ConfigError("invalid churn parameter: mean_interval_ms");
    }
    Rng rng(seed);
    FogOverlay current = overlay;
    std::uint32_t next_id = raw(overlay.devices().back().id) + 1;
    double clock = 0.0;
    std::vector<ChurnEvent> events;
    events.reserve(n_events);

    while (events.size() < n_events) {
        clock += -params.mean_interval_ms * std::log1p(-rng.uniform01());
        ChurnEvent event;
        event.time_ms = clock;

        bool leave = current.size() > params.min_devices && rng.bernoulli(params.leave_probability);
        if (leave) {
            const auto cut = articulation_points(current.adjacency());
            std::vector<DeviceId> candidates;
            for (std::size_t i = 0; i < current.size(); ++i) {
                const auto id = current.id_at(i);
                const bool last_cloud = current.cloud_latency().size() == 1 && current.cloud_latency_of(id);
                if (!cut[i] && !last_cloud) {
                    candidates.push_back(id);
                }
            }
            if (candidates.empty()) {
                leave = false;
            } else {
                event.kind = LeaveEvent{candidates[rng.index(candidates.size())]};
            }
        }
        if (!leave) {
            JoinEvent join;
            join.device = random_device(DeviceId{next_id++}, rng, params.device_params);
            std::vector<std::size_t> order(current.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                order[i] = i;
            }
            const auto n_links = std::min(params.join_links, order.size());
            for (std::size_t i = 0; i < n_links; ++i) {
                const auto j = i + rng.index(order.size() - i);
                std::swap(order[i], order[j]);
                join.links.push_back({current.id_at(order[i]), rng.uniform(params.device_params.latency_min_ms,
                                                                          params.device_params.latency_max_ms)});
            }
            if (rng.bernoulli(params.device_params.cloud_attach_fraction)) {
                join.cloud_latency_ms =
                    rng.uniform(params.device_params.cloud_latency_min_ms, params.device_params.cloud_latency_max_ms);
            }
            event.kind = std::move(join);
        }
        current = apply_churn(current, event);
        events.push_back(std::move(event));
    }
    return events;
}

ShortestPaths shortest_paths(const FogOverlay& overlay, std::size_t source_index) {
    const auto& adj = overlay.adjacency();
    const std::size_t n = adj.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    ShortestPaths out{std::vector<double>(n, inf), std::vector<std::size_t>(n, n), std::vector<std::size_t>(n, n)};
    using Entry = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    out.distance_ms[source_index] = 0.0;
    out.hops[source_index] = 0;
    out.predecessor[source_index] = source_index;
    heap.emplace(0.0, 0, source_index);
    std::vector<bool> done(n, false);
    while (!heap.empty()) {
        const auto [d, h, v] = heap.top();
        heap.pop();
        if (done[v]) {
            continue;
        }
        done[v] = true;
        for (const auto& nb : adj[v]) {
            const double nd = d + nb.latency_ms;
            const std::size_t nh = h + 1;
            auto& cur = out.distance_ms[nb.index];
            if (nd < cur || (nd == cur && nh < out.hops[nb.index])) {
                cur = nd;
                out.hops[nb.index] = nh;
                out.predecessor[nb.index] = v;
                heap.emplace(nd, nh, nb.index);
            }
        }
    }
    return out;
}

double latency_to_cloud(const FogOverlay& overlay, DeviceId device) {
    const auto paths = shortest_paths(overlay, overlay.index_of(device));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [gateway, latency] : overlay.cloud_latency()) {
        best = std::min(best, paths.distance_ms[overlay.index_of(gateway)] + latency);
    }
    return best;
}

std::vector<double> all_latencies_to_cloud(const FogOverlay& overlay) {
    // Multi-source label setting seeded with each device's direct cloud latency.
    const auto& adj = overlay.adjacency();
    std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (const auto& [id, latency] : overlay.cloud_latency()) {
        const auto i = overlay.index_of(id);
        dist[i] = latency;
        heap.emplace(latency, i);
    }
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) {
            continue;
        }
        for (const auto& nb : adj[v]) {
            if (d + nb.latency_ms < dist[nb.index]) {
                dist[nb.index] = d + nb.latency_ms;
                heap.emplace(dist[nb.index], nb.index);
            }
        }
    }
    return dist;
}

std::string serialize_overlay(const FogOverlay& overlay) {
    nlohmann::ordered_json doc;
    doc["devices"] = nlohmann::ordered_json::array();
    for (const auto& d : overlay.devices()) {
        doc["devices"].push_back({{"id", raw(d.id)},
                                  {"mips", d.mips},
                                  {"memory_gb", d.memory_gb},
                                  {"storage_gb", d.storage_gb},
                                  {"arch", to_string(d.arch)}});
    }
    doc["links"] = nlohmann::ordered_json::array();
    for (const auto& l : overlay.links()) {
        doc["links"].push_back({{"a", raw(l.a)}, {"b", raw(l.b)}, {"latency_ms", l.latency_ms}});
    }
    doc["cloud"] = nlohmann::ordered_json::array();
    for (const auto& [id, latency] : overlay.cloud_latency()) {
        doc["cloud"].push_back({{"id", raw(id)}, {"latency_ms", latency}});
    }
    return doc.dump(2) + "\n";
}

FogOverlay parse_overlay(std::string_view text) {
    std::vector<FogDevice> devices;
    std::vector<Link> links;
    std::map<DeviceId, double> cloud;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const auto& d : doc.at("devices")) {
            devices.push_back({DeviceId{d.at("id").get<std::uint32_t>()}, d.at("mips").get<double>(),
                               d.at("memory_gb").get<double>(), d.at("storage_gb").get<double>(),
                               parse_arch(d.at("arch").get<std::string>())});
        }
        for (const auto& l : doc.at("links")) {
            links.push_back({DeviceId{l.at("a").get<std::uint32_t>()}, DeviceId{l.at("b").get<std::uint32_t>()},
                             l.at("latency_ms").get<double>()});
        }
        for (const auto& c : doc.at("cloud")) {
            const DeviceId id{c.at("id").get<std::uint32_t>()};
            if (!cloud.emplace(id, c.at("latency_ms").get<double>()).second) {
                throw ConfigError("duplicate cloud entry for device " + id_text(id));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed overlay document: ") + e.what());
    }
    return FogOverlay(std::move(devices), std::move(links), std::move(cloud));
}

} // namespace smartfog
