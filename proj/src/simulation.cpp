#include "smartfog/simulation.hpp"

#include "smartfog/error.hpp"
#include "smartfog/random.hpp"
#include "smartfog/stats.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>

namespace smartfog {

std::string_view to_string(Mode mode) { return mode == Mode::SmartFog ? "smartfog" : "unoptimized"; }

Mode parse_mode(std::string_view text) {
    if (text == "smartfog") {
        return Mode::SmartFog;
    }
    if (text == "unoptimized") {
        return Mode::UnoptimizedFog;
    }
    throw ConfigError("unknown mode '" + std::string(text) + "'");
}

void WorkloadSpec::validate() const {
    auto fail = [](const std::string& field) { throw ConfigError("invalid workload parameter: " + field); };
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!(sensors_per_device >= 0.0) || !std::isfinite(sensors_per_device)) {
        fail("sensors_per_device");
    }
    if (!positive(spa_interval_ms)) {
        fail("spa_interval_ms");
    }
    if (!positive(pc_interval_ms)) {
        fail("pc_interval_ms");
    }
    if (!(jitter >= 0.0 && jitter < 1.0)) {
        fail("jitter");
    }
    if (!positive(spa_mi_min) || !std::isfinite(spa_mi_max) || spa_mi_max < spa_mi_min) {
        fail("spa_mi range");
    }
    if (!positive(pc_mi_min) || !std::isfinite(pc_mi_max) || pc_mi_max < pc_mi_min) {
        fail("pc_mi range");
    }
    if (spa_bytes == 0 || pc_bytes == 0) {
        fail("tuple bytes");
    }
    if (!positive(access_latency_min_ms) || !std::isfinite(access_latency_max_ms) ||
        access_latency_max_ms < access_latency_min_ms) {
        fail("access latency range");
    }
    if (access_hops == 0) {
        fail("access_hops");
    }
    if (cloud_hops == 0) {
        fail("cloud_hops");
    }
    if (!positive(cloud_mips)) {
        fail("cloud_mips");
    }
    if (!positive(horizon_ms)) {
        fail("horizon_ms");
    }
    if (!(warmup_ms >= 0.0) || warmup_ms >= horizon_ms) {
        fail("warmup_ms");
    }
}

namespace {

enum Stream : std::uint64_t { kSensorStream = 1, kPlacementStream = 2, kEmissionStream = 3, kWorkStream = 4 };

// All-pairs latency and hop tables plus each device's cheapest cloud egress.
struct RoutingTable {
    std::vector<ShortestPaths> from;
    std::vector<std::size_t> egress;       // cloud-attached device used by each device
    std::vector<double> egress_latency_ms;  // path to egress + its cloud link

    explicit RoutingTable(const FogOverlay& overlay) {
        const std::size_t n = overlay.size();
        from.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            from.push_back(shortest_paths(overlay, i));
        }
        egress.assign(n, n);
        egress_latency_ms.assign(n, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [id, latency] : overlay.cloud_latency()) {
                const auto c = overlay.index_of(id);
                const double total = from[i].distance_ms[c] + latency;
                if (total < egress_latency_ms[i]) {
                    egress_latency_ms[i] = total;
                    egress[i] = c;
                }
            }
        }
    }

    double latency(std::size_t a, std::size_t b) const { return from[a].distance_ms[b]; }
    std::size_t hops(std::size_t a, std::size_t b) const { return from[a].hops[b]; }
};

std::size_t nearest_of(const RoutingTable& routes, std::size_t origin, const std::vector<std::size_t>& candidates,
                       double extra(const RoutingTable&, std::size_t)) {
    std::size_t best = candidates.front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto c : candidates) {
        const double cost = routes.latency(origin, c) + extra(routes, c);
        if (cost < best_cost) {
            best_cost = cost;
            best = c;
        }
    }
    return best;
}

double no_extra(const RoutingTable&, std::size_t) { return 0.0; }
double egress_extra(const RoutingTable& routes, std::size_t c) { return routes.egress_latency_ms[c]; }

Placement place_with_routes(const FogOverlay& overlay, const RoutingTable& routes, std::span<const Sensor> sensors,
                            Mode mode, const SmartFogPlan* plan, std::uint64_t seed) {
    if (sensors.empty()) {
        throw ContractError("placement needs at least one sensor");
    }
    Placement out;
    const std::size_t n = overlay.size();

    if (mode == Mode::UnoptimizedFog) {
        Rng rng(derive_seed(seed, kPlacementStream));
        for (const auto& s : sensors) {
            out.edge_modules[s.id] = overlay.id_at(rng.index(n));
        }
        std::vector<DeviceId> attached;
        for (const auto& [id, latency] : overlay.cloud_latency()) {
            attached.push_back(id);
        }
        for (const auto& d : overlay.devices()) {
            out.cloud_route[d.id] = attached[rng.index(attached.size())];
        }
        return out;
    }

    if (plan == nullptr || plan->assignment.gateways.empty()) {
        throw ContractError("SmartFog placement requires a gateway assignment");
    }
    // Candidate processing devices: members of compute-optimized areas, or of
    // any area when none is compute-optimized.
    std::vector<bool> in_compute(n, false);
    bool any_compute = false;
    for (const auto& area : plan->areas) {
        any_compute = any_compute || area.area_type == AreaType::ComputeOptimized;
    }
    for (const auto& area : plan->areas) {
        if (any_compute && area.area_type != AreaType::ComputeOptimized) {
            continue;
        }
        for (const auto id : area.members) {
            in_compute[overlay.index_of(id)] = true;
        }
    }
    std::vector<std::size_t> compute_members;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_compute[i]) {
            compute_members.push_back(i);
        }
    }
    std::vector<std::size_t> gateways;
    for (const auto& g : plan->assignment.gateways) {
        gateways.push_back(overlay.index_of(g.device));
    }
    if (compute_members.empty()) {
        compute_members = gateways;
    }

    for (const auto& s : sensors) {
        const auto access = overlay.index_of(s.access_device);
        out.edge_modules[s.id] = overlay.id_at(nearest_of(routes, access, compute_members, no_extra));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = overlay.id_at(i);
        if (plan->assignment.is_gateway(id)) {
            out.cloud_route[id] = id;
            continue;
        }
        std::vector<std::size_t> owners;
        for (const auto& area : plan->areas) {
            if (area.contains(id)) {
                owners.push_back(overlay.index_of(area.owner_gateway));
            }
        }
        const auto& pool = owners.empty() ? gateways : owners;
        out.cloud_route[id] = overlay.id_at(nearest_of(routes, i, pool, egress_extra));
    }
    return out;
}

struct Tuple {
    TupleKind kind = TupleKind::SPA;
    double mi = 0.0;
    std::uint64_t bytes = 0;
    double emit_ms = 0.0;
    std::size_t server = 0;
    double up_ms = 0.0;
    double down_ms = 0.0;
    std::size_t up_hops = 0;
    std::size_t down_hops = 0;
    bool finished = false;
};

enum class EventType { Emit, Arrive, ServiceDone, Deliver };

struct Event {
    double time_ms;
    std::uint64_t sequence;
    EventType type;
    std::size_t subject;  // sensor for Emit, tuple for Arrive/Deliver, server for ServiceDone
    TupleKind kind;

    bool operator>(const Event& other) const {
        return time_ms != other.time_ms ? time_ms > other.time_ms : sequence > other.sequence;
    }
};

struct Server {
    double mips = 0.0;
    std::deque<std::size_t> queue;
    bool busy = false;
};

} // namespace

std::vector<Sensor> generate_sensors(const FogOverlay& overlay, const WorkloadSpec& workload, std::uint64_t seed) {
    workload.validate();
    Rng rng(derive_seed(seed, kSensorStream));
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(workload.sensors_per_device * static_cast<double>(overlay.size()))));
    std::vector<Sensor> sensors(count);
    for (std::size_t i = 0; i < count; ++i) {
        sensors[i].id = i;
        sensors[i].access_device = overlay.id_at(rng.index(overlay.size()));
        sensors[i].access_latency_ms = rng.uniform(workload.access_latency_min_ms, workload.access_latency_max_ms);
    }
    return sensors;
}

SmartFogPlan plan_smartfog(const FogOverlay& overlay, const PlanOptions& options, std::uint64_t seed) {
    const auto scores = betweenness(overlay, options.centrality);
    SmartFogPlan plan;
    plan.assignment = select_gateways(overlay, options.areas, scores);
    plan.areas = cluster_functional_areas(overlay, plan.assignment, options.clusters, seed, options.spectral);
    return plan;
}

Placement place_edge_ward(const FogOverlay& overlay, std::span<const Sensor> sensors, Mode mode,
                          const SmartFogPlan* plan, std::uint64_t seed) {
    return place_with_routes(overlay, RoutingTable(overlay), sensors, mode, plan, seed);
}

namespace {

SimulationReport simulate(const FogOverlay& overlay, const RoutingTable& routes, Mode mode,
                          const WorkloadSpec& workload, std::uint64_t seed, std::span<const Sensor> sensors,
                          const Placement& placement) {
    const std::size_t n = overlay.size();
    SimulationReport report;
    report.mode = mode;
    report.n_devices = n;
    report.seed = seed;
    report.workload = workload;

    std::vector<Server> servers(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        servers[i].mips = overlay.devices()[i].mips;
    }
    const std::size_t cloud = n;
    servers[cloud].mips = workload.cloud_mips;

    Rng emission_rng(derive_seed(seed, kEmissionStream));
    Rng work_rng(derive_seed(seed, kWorkStream));
    std::vector<Tuple> tuples;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t sequence = 0;
    auto schedule = [&](double t, EventType type, std::size_t subject, TupleKind kind) {
        if (t <= workload.horizon_ms) {
            events.push({t, sequence++, type, subject, kind});
        }
    };
    auto next_gap = [&](double interval) {
        return interval * emission_rng.uniform(1.0 - workload.jitter, 1.0 + workload.jitter);
    };

    for (std::size_t s = 0; s < sensors.size(); ++s) {
        schedule(emission_rng.uniform(0.0, workload.spa_interval_ms), EventType::Emit, s, TupleKind::SPA);
        schedule(emission_rng.uniform(0.0, workload.pc_interval_ms), EventType::Emit, s, TupleKind::PC);
    }

    auto start_service = [&](std::size_t server_index, double now) {
        auto& server = servers[server_index];
        if (server.busy || server.queue.empty()) {
            return;
        }
        server.busy = true;
        const auto& t = tuples[server.queue.front()];
        schedule(now + t.mi / server.mips * 1000.0, EventType::ServiceDone, server_index, t.kind);
    };

    // Builds the route for a fresh tuple; false when no route exists.
    auto route = [&](const Sensor& sensor, Tuple& t) {
        const auto module_it = placement.edge_modules.find(sensor.id);
        if (module_it == placement.edge_modules.end() || !overlay.contains(module_it->second) ||
            !overlay.contains(sensor.access_device)) {
            return false;
        }
        const auto device = overlay.index_of(module_it->second);
        if (t.kind == TupleKind::SPA) {
            const auto access = overlay.index_of(sensor.access_device);
            t.server = device;
            t.up_ms = sensor.access_latency_ms + routes.latency(access, device);
            t.up_hops = workload.access_hops + routes.hops(access, device);
        } else {
            const auto route_it = placement.cloud_route.find(module_it->second);
            if (route_it == placement.cloud_route.end() || !overlay.contains(route_it->second)) {
                return false;
            }
            const auto gateway = overlay.index_of(route_it->second);
            const auto egress = routes.egress[gateway];
            if (egress == n) {
                return false;
            }
            t.server = cloud;
            t.up_ms = routes.latency(device, gateway) + routes.egress_latency_ms[gateway];
            t.up_hops = routes.hops(device, gateway) + routes.hops(gateway, egress) + workload.cloud_hops;
        }
        t.down_ms = t.up_ms;
        t.down_hops = t.up_hops;
        return std::isfinite(t.up_ms);
    };

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();
        const double now = ev.time_ms;
        switch (ev.type) {
        case EventType::Emit: {
            const auto& sensor = sensors[ev.subject];
            Tuple t;
            t.kind = ev.kind;
            t.emit_ms = now;
            auto& counters = t.kind == TupleKind::SPA ? report.spa : report.pc;
            ++counters.emitted;
            if (t.kind == TupleKind::SPA) {
                t.mi = work_rng.uniform(workload.spa_mi_min, workload.spa_mi_max);
                t.bytes = workload.spa_bytes;
            } else {
                t.mi = work_rng.uniform(workload.pc_mi_min, workload.pc_mi_max);
                t.bytes = workload.pc_bytes;
            }
            if (route(sensor, t)) {
                tuples.push_back(t);
                schedule(now + t.up_ms, EventType::Arrive, tuples.size() - 1, t.kind);
            } else {
                ++counters.dropped;
                t.finished = true;
                tuples.push_back(t);
            }
            const double interval = t.kind == TupleKind::SPA ? workload.spa_interval_ms : workload.pc_interval_ms;
            schedule(now + next_gap(interval), EventType::Emit, ev.subject, ev.kind);
            break;
        }
        case EventType::Arrive: {
            const auto& t = tuples[ev.subject];
            report.network_load_bytes += t.bytes * t.up_hops;
            servers[t.server].queue.push_back(ev.subject);
            start_service(t.server, now);
            break;
        }
        case EventType::ServiceDone: {
            auto& server = servers[ev.subject];
            const auto done = server.queue.front();
            server.queue.pop_front();
            server.busy = false;
            schedule(now + tuples[done].down_ms, EventType::Deliver, done, tuples[done].kind);
            start_service(ev.subject, now);
            break;
        }
        case EventType::Deliver: {
            auto& t = tuples[ev.subject];
            report.network_load_bytes += t.bytes * t.down_hops;
            t.finished = true;
            auto& counters = t.kind == TupleKind::SPA ? report.spa : report.pc;
            ++counters.completed;
            if (t.emit_ms >= workload.warmup_ms) {
                (t.kind == TupleKind::SPA ? report.spa_delays_ms : report.pc_delays_ms).push_back(now - t.emit_ms);
            }
            break;
        }
        }
    }

    for (const auto& t : tuples) {
        if (!t.finished) {
            ++(t.kind == TupleKind::SPA ? report.spa : report.pc).in_flight;
        }
    }
    return report;
}

} // namespace

SimulationReport run_simulation(const FogOverlay& overlay, Mode mode, const WorkloadSpec& workload,
                                std::uint64_t seed, std::span<const Sensor> sensors, const Placement& placement) {
    workload.validate();
    return simulate(overlay, RoutingTable(overlay), mode, workload, seed, sensors, placement);
}

SimulationReport run_simulation(const FogOverlay& overlay, Mode mode, const WorkloadSpec& workload,
                                std::uint64_t seed, const SmartFogPlan* plan) {
    workload.validate();
    if (mode == Mode::SmartFog && plan == nullptr) {
        throw ContractError("SmartFog simulation requires a gateway assignment and functional areas");
    }
    const RoutingTable routes(overlay);
    const auto sensors = generate_sensors(overlay, workload, seed);
    const auto placement = place_with_routes(overlay, routes, sensors, mode, plan, seed);
    return simulate(overlay, routes, mode, workload, seed, sensors, placement);
}

std::string report_csv_row(const SimulationReport& report) {
    std::ostringstream row;
    row.precision(17);
    row << to_string(report.mode) << ',' << report.n_devices << ',' << report.seed << ','
        << median(report.spa_delays_ms) << ',' << stddev(report.spa_delays_ms) << ','
        << median(report.pc_delays_ms) << ',' << stddev(report.pc_delays_ms) << ',' << report.network_load_bytes << ','
        << report.completed() << ',' << report.dropped();
    return row.str();
}

} // namespace smartfog
