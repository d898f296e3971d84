#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace smartfog {

enum class DeviceId : std::uint32_t {};

constexpr std::uint32_t raw(DeviceId id) noexcept { return static_cast<std::uint32_t>(id); }

enum class Arch : std::uint8_t { ARM, X86 };

std::string_view to_string(Arch arch);
Arch parse_arch(std::string_view text);

struct FogDevice {
    DeviceId id{};
    double mips = 0.0;
    double memory_gb = 0.0;
    double storage_gb = 0.0;
    Arch arch = Arch::ARM;

    friend bool operator==(const FogDevice&, const FogDevice&) = default;
};

// Undirected link; stored with a < b.
struct Link {
    DeviceId a{};
    DeviceId b{};
    double latency_ms = 0.0;

    friend bool operator==(const Link&, const Link&) = default;
};

struct Neighbor {
    std::size_t index;
    double latency_ms;
};

// Immutable fog overlay: devices, latency-weighted links and cloud
// attachment. Construction validates every invariant, so any FogOverlay value
// in hand is connected, loop-free and has at least one cloud-attached device.
class FogOverlay {
public:
    FogOverlay(std::vector<FogDevice> devices, std::vector<Link> links,
               std::map<DeviceId, double> cloud_latency_ms);

    std::size_t size() const noexcept { return devices_.size(); }

    // Devices in ascending id order; positions are the dense indices used by
    // adjacency() and the graph algorithms.
    std::span<const FogDevice> devices() const noexcept { return devices_; }
    std::span<const Link> links() const noexcept { return links_; }
    const std::map<DeviceId, double>& cloud_latency() const noexcept { return cloud_; }

    bool contains(DeviceId id) const;
    std::size_t index_of(DeviceId id) const;
    const FogDevice& device(DeviceId id) const { return devices_[index_of(id)]; }
    DeviceId id_at(std::size_t index) const { return devices_[index].id; }

    std::optional<double> link_latency(DeviceId a, DeviceId b) const;
    std::optional<double> cloud_latency_of(DeviceId id) const;

    const std::vector<std::vector<Neighbor>>& adjacency() const noexcept { return adjacency_; }
    std::size_t degree(DeviceId id) const { return adjacency_[index_of(id)].size(); }

    friend bool operator==(const FogOverlay& lhs, const FogOverlay& rhs) {
        return lhs.devices_ == rhs.devices_ && lhs.links_ == rhs.links_ && lhs.cloud_ == rhs.cloud_;
    }

private:
    std::vector<FogDevice> devices_;
    std::vector<Link> links_;
    std::map<DeviceId, double> cloud_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

// True when every vertex is reachable from vertex 0 (BFS).
bool is_connected(const std::vector<std::vector<Neighbor>>& adjacency);

struct OverlayParams {
    double mips_min = 800.0;
    double mips_max = 1200.0;
    int memory_min_gb = 1;
    int memory_max_gb = 4;
    double storage_gb = 16.0;
    double mean_degree = 3.0;
    double latency_min_ms = 1.0;
    double latency_max_ms = 10.0;
    double cloud_latency_min_ms = 50.0;
    double cloud_latency_max_ms = 100.0;
    // Fraction of devices with a direct cloud link; at least one is always attached.
    double cloud_attach_fraction = 1.0;

    void validate() const;
};

// Random connected mesh: a uniformly random labelled spanning tree (Pruefer
// decoding) plus random chords until the target mean degree is reached.
// Device ids are 0..n-1. Same (n, seed, params) gives the same overlay.
FogOverlay build_overlay(std::size_t n_devices, std::uint64_t seed, const OverlayParams& params = {});

struct AttachmentLink {
    DeviceId peer{};
    double latency_ms = 0.0;
};

struct JoinEvent {
    FogDevice device;
    std::vector<AttachmentLink> links;
    std::optional<double> cloud_latency_ms;
};

struct LeaveEvent {
    DeviceId device{};
};

struct ChurnEvent {
    std::variant<JoinEvent, LeaveEvent> kind;
    double time_ms = 0.0;
};

// Returns the overlay after the event; the input is left untouched.
// Throws ChurnRejected when the result would be disconnected or lose its last
// cloud-attached device, ConflictError on a duplicate join id, ContractError
// on unknown ids.
FogOverlay apply_churn(const FogOverlay& overlay, const ChurnEvent& event);

struct ChurnParams {
    double mean_interval_ms = 1000.0;
    double leave_probability = 0.5;
    std::size_t join_links = 2;
    std::size_t min_devices = 2;
    OverlayParams device_params{};
};

// Random join/leave schedule starting from `overlay`. Leaves only target
// vertices whose removal keeps the graph connected; every emitted event is
// accepted by apply_churn when replayed in order.
std::vector<ChurnEvent> generate_churn(const FogOverlay& overlay, std::size_t n_events, std::uint64_t seed,
                                       const ChurnParams& params = {});

// Cut vertices (articulation points) by dense index.
std::vector<bool> articulation_points(const std::vector<std::vector<Neighbor>>& adjacency);

// Single-source shortest paths over link latencies. hops[] counts the edges of
// the chosen path; among equal-latency paths the one with fewer hops wins.
struct ShortestPaths {
    std::vector<double> distance_ms;
    std::vector<std::size_t> hops;
    std::vector<std::size_t> predecessor;  // == index for the source itself
};

ShortestPaths shortest_paths(const FogOverlay& overlay, std::size_t source_index);

// Minimum over cloud-attached g of (path latency device->g + cloud_latency[g]).
double latency_to_cloud(const FogOverlay& overlay, DeviceId device);

// latency_to_cloud for every device, indexed like devices().
std::vector<double> all_latencies_to_cloud(const FogOverlay& overlay);

// Structured-text (JSON) form with `devices`, `links` and `cloud` arrays.
std::string serialize_overlay(const FogOverlay& overlay);
FogOverlay parse_overlay(std::string_view text);

} // namespace smartfog
