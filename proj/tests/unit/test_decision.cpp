#include "oracles.hpp"

#include "smartfog/decision.hpp"
#include "smartfog/error.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>

using namespace smartfog;

namespace {

constexpr AreaType C = AreaType::ComputeOptimized;
constexpr AreaType M = AreaType::MemoryOptimized;

DeviceId id(std::uint32_t v) { return DeviceId{v}; }

std::vector<DeviceEvaluation> random_evaluations(Rng& rng, std::size_t n) {
    std::vector<DeviceEvaluation> out;
    for (std::size_t i = 0; i < n; ++i) {
        // Coarse values make ties and deep fronts likely.
        out.emplace_back(id(static_cast<std::uint32_t>(i)), static_cast<double>(rng.uniform_int(0, 5)),
                         800.0 + 100.0 * static_cast<double>(rng.uniform_int(0, 4)),
                         50.0 + 10.0 * static_cast<double>(rng.uniform_int(0, 5)),
                         static_cast<double>(rng.uniform_int(1, 4)));
    }
    return out;
}

std::vector<AreaType> random_areas(Rng& rng, std::size_t count) {
    std::vector<AreaType> areas(count);
    for (auto& a : areas) {
        a = rng.bernoulli(0.5) ? C : M;
    }
    return areas;
}

std::vector<oracle::Candidate> as_candidates(const std::vector<DeviceEvaluation>& evals) {
    std::vector<oracle::Candidate> out;
    for (const auto& e : evals) {
        out.push_back({raw(e.device), e.betweenness(), e.mips(), e.cloud_latency_ms(), e.memory_gb});
    }
    return out;
}

std::vector<std::uint32_t> ids(const GatewayAssignment& a) {
    std::vector<std::uint32_t> out;
    for (const auto& g : a.gateways) {
        out.push_back(raw(g.device));
    }
    return out;
}

std::vector<bool> compute_flags(const std::vector<AreaType>& areas) {
    std::vector<bool> out;
    for (const auto a : areas) {
        out.push_back(a == C);
    }
    return out;
}

FogDevice dev(std::uint32_t v, double mips, double mem) { return FogDevice{id(v), mips, mem, 16.0, Arch::ARM}; }

} // namespace

TEST_SUITE("decision") {

TEST_CASE("evaluation of a two-device chain") {
    const FogOverlay o({dev(0, 1000, 2), dev(1, 1000, 2)}, {{id(0), id(1), 5.0}}, {{id(1), 10.0}});
    const auto evals = evaluate_devices(o, betweenness(o));
    REQUIRE(evals.size() == 2);
    CHECK(evals[1].cloud_latency_ms() < evals[0].cloud_latency_ms());
    CHECK(evals[0].cloud_latency_ms() == 15.0);
}

TEST_CASE("star centre has the highest betweenness objective") {
    std::vector<FogDevice> devs;
    std::vector<Link> links;
    std::map<DeviceId, double> cloud;
    for (std::uint32_t i = 0; i < 6; ++i) {
        devs.push_back(dev(i, 1000, 2));
        cloud[id(i)] = 60.0;
        if (i > 0) {
            links.push_back({id(0), id(i), 2.0});
        }
    }
    const FogOverlay o(devs, links, cloud);
    const auto evals = evaluate_devices(o, betweenness(o));
    for (std::size_t i = 1; i < evals.size(); ++i) {
        CHECK(evals[0].betweenness() > evals[i].betweenness());
    }
}

TEST_CASE("missing centrality entry is a contract error") {
    const auto o = build_overlay(5, 1);
    auto scores = betweenness(o);
    scores.scores.erase(o.id_at(2));
    CHECK_THROWS_AS(evaluate_devices(o, scores), ContractError);
}

TEST_CASE("objectives equal independently recomputed values") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto o = build_overlay(11, seed);
        const auto evals = evaluate_devices(o, betweenness(o, CentralityMode::WeightedByLatency));
        oracle::Graph g;
        g.n = o.size();
        for (const auto& l : o.links()) {
            g.edges.push_back({o.index_of(l.a), o.index_of(l.b), l.latency_ms});
        }
        const auto ref = oracle::exhaustive_betweenness(g, true);
        for (std::size_t i = 0; i < o.size(); ++i) {
            CHECK(evals[i].device == o.id_at(i));
            CHECK(std::abs(evals[i].betweenness() - ref[i]) <= 1e-9);
            CHECK(evals[i].mips() == o.devices()[i].mips);
            CHECK(evals[i].memory_gb == o.devices()[i].memory_gb);
            CHECK(evals[i].cloud_latency_ms() == doctest::Approx(oracle::brute_force_cloud_latency(o, o.id_at(i))));
        }
    }
}

TEST_CASE("priority orders") {
    const std::vector<DeviceEvaluation> two{DeviceEvaluation(id(0), 1, 1200, 60, 1), DeviceEvaluation(id(1), 1, 900, 60, 4)};
    CHECK(partition_front(two, C).front().device == id(0));
    CHECK(partition_front(two, M).front().device == id(1));
    const std::vector<DeviceEvaluation> one{DeviceEvaluation(id(7), 0, 1000, 60, 2)};
    CHECK(partition_front(one, C).front().device == id(7));
    CHECK(partition_front(one, M).front().device == id(7));
    CHECK_THROWS_AS(partition_front(std::vector<DeviceEvaluation>{}, C), ContractError);
}

TEST_CASE("tie chain: latency, then betweenness, then id") {
    const std::vector<DeviceEvaluation> tied{
        DeviceEvaluation(id(4), 1, 1000, 70, 2), DeviceEvaluation(id(3), 2, 1000, 60, 2),
        DeviceEvaluation(id(2), 1, 1000, 60, 2), DeviceEvaluation(id(1), 1, 1000, 60, 2)};
    const auto order = partition_front(tied, C);
    std::vector<DeviceId> got;
    for (const auto& e : order) {
        got.push_back(e.device);
    }
    CHECK(got == std::vector<DeviceId>{id(3), id(1), id(2), id(4)});
}

TEST_CASE("a device dominating all others is the single gateway") {
    const std::vector<DeviceEvaluation> evals{DeviceEvaluation(id(0), 1, 900, 80, 4), DeviceEvaluation(id(1), 9, 1200, 50, 1),
                                              DeviceEvaluation(id(2), 3, 1000, 60, 2)};
    const std::vector<AreaType> areas{M};
    const auto a = select_gateways(evals, areas);
    REQUIRE(a.gateways.size() == 1);
    CHECK(a.gateways[0].device == id(1));
    CHECK(a.is_gateway(id(1)));
    CHECK_FALSE(a.is_gateway(id(0)));
}

TEST_CASE("two trade-off devices are matched to their strengths") {
    const std::vector<DeviceEvaluation> evals{DeviceEvaluation(id(0), 1, 900, 60, 4), DeviceEvaluation(id(1), 1, 1200, 70, 1)};
    const std::vector<AreaType> areas{C, M};
    const auto a = select_gateways(evals, areas);
    CHECK(a.gateways == std::vector<Gateway>{{id(1), C}, {id(0), M}});
}

TEST_CASE("selection falls through to deeper fronts") {
    // Strict chain: three singleton fronts.
    const std::vector<DeviceEvaluation> evals{DeviceEvaluation(id(0), 1, 900, 80, 4), DeviceEvaluation(id(1), 3, 1100, 50, 1),
                                              DeviceEvaluation(id(2), 2, 1000, 60, 2)};
    const std::vector<AreaType> areas{M, M, C};
    CHECK(ids(select_gateways(evals, areas)) == std::vector<std::uint32_t>{1, 2, 0});
}

TEST_CASE("selection errors") {
    const std::vector<DeviceEvaluation> evals{DeviceEvaluation(id(0), 1, 900, 80, 4)};
    CHECK_THROWS_AS(select_gateways(evals, std::vector<AreaType>{}), ContractError);
    CHECK_THROWS_AS(select_gateways(evals, std::vector<AreaType>{C, M}), CapacityError);
    const auto o = build_overlay(3, 1);
    CHECK_THROWS_AS(select_gateways(o, std::vector<AreaType>{C, C, C, C}, betweenness(o)), CapacityError);
}

TEST_CASE("seeded overlays match the replay oracle") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto o = build_overlay(20, seed);
        const auto evals = evaluate_devices(o, betweenness(o));
        for (std::size_t nf = 1; nf <= 3; ++nf) {
            std::vector<AreaType> areas;
            for (std::size_t k = 0; k < nf; ++k) {
                areas.push_back((seed + k) % 2 == 0 ? C : M);
            }
            CHECK(ids(select_gateways(o, areas, betweenness(o))) ==
                  oracle::replay_selection(as_candidates(evals), compute_flags(areas)));
        }
    }
}

TEST_CASE("random evaluations match the replay oracle") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.index(25);
        const auto evals = random_evaluations(rng, n);
        const auto areas = random_areas(rng, 1 + rng.index(n));
        const auto got = select_gateways(evals, areas);
        CHECK(ids(got) == oracle::replay_selection(as_candidates(evals), compute_flags(areas)));
        for (std::size_t k = 0; k < areas.size(); ++k) {
            CHECK(got.gateways[k].area == areas[k]);
        }
    }
}

TEST_CASE("gateways are distinct and never dominated by an unselected device") {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 2 + rng.index(25);
        const auto evals = random_evaluations(rng, n);
        const auto a = select_gateways(evals, random_areas(rng, 1 + rng.index(n)));
        auto chosen = ids(a);
        std::sort(chosen.begin(), chosen.end());
        CHECK(std::adjacent_find(chosen.begin(), chosen.end()) == chosen.end());
        for (const auto& g : a.gateways) {
            for (const auto& e : evals) {
                if (!a.is_gateway(e.device)) {
                    CHECK_FALSE(dominates(e.objectives, evals[raw(g.device)].objectives));
                }
            }
        }
    }
}

TEST_CASE("removing a dominated device below the used fronts keeps the assignment") {
    Rng rng(47);
    int exercised = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 3 + rng.index(25);
        const auto evals = random_evaluations(rng, n);
        const auto areas = random_areas(rng, 1 + rng.index(3));
        if (areas.size() > n) {
            continue;
        }
        const auto before = select_gateways(evals, areas);
        std::vector<ObjectiveVector> pts;
        for (const auto& e : evals) {
            pts.push_back(e.objectives);
        }
        const auto fronts = non_dominated_sort(pts);
        std::size_t deepest = 0;
        for (const auto& g : before.gateways) {
            deepest = std::max(deepest, fronts.rank_of(raw(g.device)));
        }
        for (std::size_t victim = 0; victim < n; ++victim) {
            if (before.is_gateway(evals[victim].device) || fronts.rank_of(victim) <= deepest) {
                continue;
            }
            auto reduced = evals;
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(victim));
            CHECK(select_gateways(reduced, areas) == before);
            ++exercised;
        }
    }
    CHECK(exercised > 100);
}

TEST_CASE("assignment export") {
    const GatewayAssignment a{{{id(3), C}, {id(9), M}}};
    const auto doc = nlohmann::json::parse(serialize_assignment(a));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["gateway"] == 3);
    CHECK(doc[0]["area_type"] == "compute");
    CHECK(doc[1]["gateway"] == 9);
    CHECK(doc[1]["area_type"] == "memory");
    CHECK(parse_area_type("memory") == M);
    CHECK_THROWS_AS(parse_area_type("network"), ConfigError);
}

} // TEST_SUITE
