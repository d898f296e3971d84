#include "smartfog/error.hpp"
#include "smartfog/simulation.hpp"
#include "smartfog/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace smartfog;

namespace {

DeviceId id(std::uint32_t v) { return DeviceId{v}; }

WorkloadSpec quiet_workload() {
    WorkloadSpec w;
    w.spa_mi_min = w.spa_mi_max = 1000.0;
    w.pc_mi_min = w.pc_mi_max = 44800.0;
    w.access_latency_min_ms = w.access_latency_max_ms = 5.0;
    w.spa_interval_ms = 100000.0;
    w.pc_interval_ms = 100000.0;
    w.jitter = 0.0;
    w.horizon_ms = 1000000.0;
    w.warmup_ms = 0.0;
    return w;
}

FogOverlay single_device() { return FogOverlay({{id(0), 1000.0, 2.0, 16.0, Arch::ARM}}, {}, {{id(0), 20.0}}); }

FogOverlay scaled(const FogOverlay& o, double factor) {
    std::vector<Link> links(o.links().begin(), o.links().end());
    for (auto& l : links) {
        l.latency_ms *= factor;
    }
    auto cloud = o.cloud_latency();
    for (auto& [k, v] : cloud) {
        v *= factor;
    }
    return FogOverlay(std::vector<FogDevice>(o.devices().begin(), o.devices().end()), links, cloud);
}

} // namespace

TEST_SUITE("simulation") {

TEST_CASE("hand-computed loop delays on one device") {
    const auto o = single_device();
    const auto w = quiet_workload();
    const auto r = run_simulation(o, Mode::UnoptimizedFog, w, 1);
    REQUIRE_FALSE(r.spa_delays_ms.empty());
    for (const double d : r.spa_delays_ms) {
        CHECK(d == doctest::Approx(5.0 + 1000.0 + 5.0));
    }
    REQUIRE_FALSE(r.pc_delays_ms.empty());
    for (const double d : r.pc_delays_ms) {
        CHECK(d == doctest::Approx(20.0 + 1000.0 + 20.0));
    }
    // One sensor: each SPA loop crosses access_hops links each way, each PC loop cloud_hops.
    const auto loops_spa = r.spa.completed;
    const auto loops_pc = r.pc.completed;
    CHECK(r.network_load_bytes == 100 * (2 * w.access_hops * loops_spa + 2 * w.cloud_hops * loops_pc));
}

TEST_CASE("nothing emitted before the horizon means no traffic") {
    auto w = quiet_workload();
    w.spa_interval_ms = 2000000.0;
    w.pc_interval_ms = 2000000.0;
    w.horizon_ms = 1.0;
    const auto r = run_simulation(single_device(), Mode::UnoptimizedFog, w, 1);
    CHECK(r.spa_delays_ms.empty());
    CHECK(r.pc_delays_ms.empty());
    CHECK(r.network_load_bytes == 0);
    CHECK(r.spa.emitted == 0);
}

TEST_CASE("one sensor on one device uses that device in both modes") {
    const auto o = single_device();
    const std::vector<Sensor> sensors{{0, id(0), 2.0}};
    SmartFogPlan plan;
    plan.assignment.gateways = {{id(0), AreaType::ComputeOptimized}};
    for (const auto mode : {Mode::SmartFog, Mode::UnoptimizedFog}) {
        const auto p = place_edge_ward(o, sensors, mode, &plan, 3);
        CHECK(p.edge_modules.at(0) == id(0));
        CHECK(p.cloud_route.at(id(0)) == id(0));
    }
    CHECK_THROWS_AS(place_edge_ward(o, std::vector<Sensor>{}, Mode::UnoptimizedFog, nullptr, 1), ContractError);
    CHECK_THROWS_AS(place_edge_ward(o, sensors, Mode::SmartFog, nullptr, 1), ContractError);
}

TEST_CASE("a one-device compute area receives all SPA traffic") {
    const auto o = build_overlay(12, 4);
    SmartFogPlan plan;
    plan.assignment.gateways = {{id(0), AreaType::ComputeOptimized}};
    plan.areas = {{id(0), AreaType::ComputeOptimized, {id(7)}, 0}};
    const auto sensors = generate_sensors(o, WorkloadSpec{}, 9);
    const auto p = place_edge_ward(o, sensors, Mode::SmartFog, &plan, 9);
    for (const auto& [sensor, device] : p.edge_modules) {
        CHECK(device == id(7));
    }
    CHECK(p.cloud_route.at(id(7)) == id(0));
    CHECK(p.cloud_route.at(id(0)) == id(0));
}

TEST_CASE("placements route through allowed gateways") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto o = build_overlay(20, seed);
        const auto plan = plan_smartfog(o, PlanOptions{}, seed);
        const auto sensors = generate_sensors(o, WorkloadSpec{}, seed);
        const auto smart = place_edge_ward(o, sensors, Mode::SmartFog, &plan, seed);
        const auto base = place_edge_ward(o, sensors, Mode::UnoptimizedFog, nullptr, seed);
        CHECK(smart.edge_modules.size() == sensors.size());
        CHECK(base.edge_modules.size() == sensors.size());
        for (const auto& [device, gateway] : smart.cloud_route) {
            CHECK(plan.assignment.is_gateway(gateway));
        }
        for (const auto& [device, forwarder] : base.cloud_route) {
            CHECK(o.cloud_latency_of(forwarder).has_value());
        }
    }
}

TEST_CASE("nearest-member placement beats random placement on mean access latency") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto o = build_overlay(20, seed);
        const auto plan = plan_smartfog(o, PlanOptions{}, seed);
        const auto sensors = generate_sensors(o, WorkloadSpec{}, seed);
        const auto smart = place_edge_ward(o, sensors, Mode::SmartFog, &plan, seed);
        const auto base = place_edge_ward(o, sensors, Mode::UnoptimizedFog, nullptr, seed);
        std::vector<bool> compute(o.size(), false);
        for (const auto& area : plan.areas) {
            if (area.area_type == AreaType::ComputeOptimized) {
                for (const auto m : area.members) {
                    compute[o.index_of(m)] = true;
                }
            }
        }
        double smart_total = 0;
        double base_total = 0;
        for (const auto& s : sensors) {
            const auto sp = shortest_paths(o, o.index_of(s.access_device));
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < o.size(); ++i) {
                if (compute[i]) {
                    nearest = std::min(nearest, sp.distance_ms[i]);
                }
            }
            const double chosen = sp.distance_ms[o.index_of(smart.edge_modules.at(s.id))];
            CHECK(chosen == doctest::Approx(nearest));
            smart_total += chosen;
            base_total += sp.distance_ms[o.index_of(base.edge_modules.at(s.id))];
        }
        CHECK(smart_total <= base_total + 1e-9);
    }
}

TEST_CASE("conservation, load bound and positive delays") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto o = build_overlay(20, seed);
        const auto plan = plan_smartfog(o, PlanOptions{}, seed);
        WorkloadSpec w;
        w.horizon_ms = 120000.0;
        for (const auto mode : {Mode::SmartFog, Mode::UnoptimizedFog}) {
            const auto r = run_simulation(o, mode, w, seed, &plan);
            for (const auto* k : {&r.spa, &r.pc}) {
                CHECK(k->emitted == k->completed + k->dropped + k->in_flight);
            }
            CHECK(r.network_load_bytes >= 100 * r.completed());
            CHECK(r.network_load_bytes >= 2 * 100 * r.spa.completed);
            for (const double d : r.spa_delays_ms) {
                CHECK(d > 0.0);
            }
            for (const double d : r.pc_delays_ms) {
                CHECK(d > 0.0);
            }
        }
    }
}

TEST_CASE("unroutable tuples are dropped, not lost") {
    const auto o = build_overlay(6, 2);
    const std::vector<Sensor> sensors{{0, id(1), 2.0}, {1, id(2), 2.0}};
    Placement p;
    p.edge_modules[0] = id(3);
    p.edge_modules[1] = id(99);  // device not in the overlay
    for (const auto& d : o.devices()) {
        p.cloud_route[d.id] = id(0);
    }
    auto w = quiet_workload();
    w.spa_interval_ms = w.pc_interval_ms = 10000.0;
    const auto r = run_simulation(o, Mode::UnoptimizedFog, w, 5, sensors, p);
    CHECK(r.dropped() > 0);
    CHECK(r.spa.emitted == r.spa.completed + r.spa.dropped + r.spa.in_flight);
    CHECK(r.pc.emitted == r.pc.completed + r.pc.dropped + r.pc.in_flight);
}

TEST_CASE("doubling latencies never shortens a loop (single sensor)") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto o = build_overlay(15, seed);
        const auto w = WorkloadSpec{};
        std::vector<Sensor> sensors{generate_sensors(o, w, seed).front()};
        const auto p = place_edge_ward(o, sensors, Mode::UnoptimizedFog, nullptr, seed);
        const auto slow = scaled(o, 2.0);
        const auto a = run_simulation(o, Mode::UnoptimizedFog, w, seed, sensors, p);
        const auto b = run_simulation(slow, Mode::UnoptimizedFog, w, seed, sensors, p);
        const auto spa = std::min(a.spa_delays_ms.size(), b.spa_delays_ms.size());
        for (std::size_t i = 0; i < spa; ++i) {
            CHECK(b.spa_delays_ms[i] >= a.spa_delays_ms[i]);
        }
        const auto pc = std::min(a.pc_delays_ms.size(), b.pc_delays_ms.size());
        for (std::size_t i = 0; i < pc; ++i) {
            CHECK(b.pc_delays_ms[i] >= a.pc_delays_ms[i]);
        }
    }
}

TEST_CASE("runs are deterministic per seed") {
    const auto o = build_overlay(20, 3);
    const auto plan = plan_smartfog(o, PlanOptions{}, 3);
    const auto a = run_simulation(o, Mode::SmartFog, WorkloadSpec{}, 3, &plan);
    const auto b = run_simulation(o, Mode::SmartFog, WorkloadSpec{}, 3, &plan);
    CHECK(a.spa_delays_ms == b.spa_delays_ms);
    CHECK(a.pc_delays_ms == b.pc_delays_ms);
    CHECK(report_csv_row(a) == report_csv_row(b));
    CHECK(report_csv_row(a) != report_csv_row(run_simulation(o, Mode::SmartFog, WorkloadSpec{}, 4, &plan)));
}

TEST_CASE("invalid workloads and missing plans are rejected") {
    const auto o = single_device();
    auto w = WorkloadSpec{};
    w.horizon_ms = 0.0;
    CHECK_THROWS_AS(run_simulation(o, Mode::UnoptimizedFog, w, 1), ConfigError);
    w = {};
    w.spa_mi_max = 10.0;
    CHECK_THROWS_AS(run_simulation(o, Mode::UnoptimizedFog, w, 1), ConfigError);
    w = {};
    w.jitter = 1.0;
    CHECK_THROWS_AS(run_simulation(o, Mode::UnoptimizedFog, w, 1), ConfigError);
    CHECK_THROWS_AS(run_simulation(o, Mode::SmartFog, WorkloadSpec{}, 1), ContractError);
    CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
}

TEST_CASE("csv row has the declared columns") {
    const auto r = run_simulation(build_overlay(10, 1), Mode::UnoptimizedFog, WorkloadSpec{}, 1);
    const auto row = report_csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(kReportCsvHeader.begin(), kReportCsvHeader.end(), ','));
    CHECK(row.rfind("unoptimized,10,1,", 0) == 0);
}

TEST_CASE("median and standard deviation helpers") {
    CHECK(median(std::vector<double>{}) == 0.0);
    CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
    CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
    CHECK(stddev(std::vector<double>{5}) == 0.0);
    CHECK(stddev(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.138089935));
}

} // TEST_SUITE
