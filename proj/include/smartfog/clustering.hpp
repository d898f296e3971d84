#pragma once

#include "smartfog/decision.hpp"
#include "smartfog/linalg.hpp"
#include "smartfog/overlay.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smartfog {

// Per-device (MIPS, memory) features, each column standardized to zero mean
// and unit population variance. A constant column is left at zero.
struct FeatureMatrix {
    DenseMatrix values;
    std::vector<DeviceId> devices;
};

FeatureMatrix build_features(std::span<const FogDevice> devices);

struct SimilarityMatrix {
    DenseMatrix values;
    double bandwidth = 1.0;
};

// S_ij = exp(-|x_i - x_j|^2 / (2 G^2)). Throws ConfigError for G <= 0 and
// ContractError for fewer than two rows.
SimilarityMatrix similarity_matrix(const FeatureMatrix& features, double bandwidth);

// Median pairwise Euclidean distance between feature rows, or 1 when that is 0.
double median_distance_bandwidth(const FeatureMatrix& features);

// L_sym = I - D^-1/2 S D^-1/2 for a symmetric non-negative affinity matrix.
DenseMatrix normalized_laplacian(const DenseMatrix& affinity);

struct SpectralEmbedding {
    DenseMatrix rows;                 // n x k, each row unit length (or zero)
    std::vector<double> eigenvalues;  // the k smallest, ascending
    DenseMatrix eigenvectors;         // n x k, before row normalization
};

// Eigenvectors of the k smallest eigenvalues of L_sym, rows renormalized.
// Throws ContractError unless 1 <= k <= n, NumericalError if Jacobi stalls.
SpectralEmbedding spectral_embed(const DenseMatrix& affinity, std::size_t k);

struct KMeansOptions {
    int max_iterations = 300;
    int restarts = 10;
};

struct KMeansResult {
    std::vector<std::size_t> labels;  // canonical: labels appear in order of first use
    double cost = 0.0;                // within-cluster sum of squared distances
    int iterations = 0;
};

// Lloyd iterations from k-means++ seeding, best of `restarts` runs. Every
// cluster is non-empty; an emptied cluster takes the point farthest from its
// centroid.
KMeansResult k_means(const DenseMatrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

// Sum of squared distances from each point to its cluster mean.
double clustering_cost(const DenseMatrix& points, std::span<const std::size_t> labels, std::size_t k);

struct SpectralOptions {
    std::optional<double> bandwidth;  // median pairwise distance when unset
    KMeansOptions k_means{};
};

// Features -> similarity -> embedding -> k-means labels.
std::vector<std::size_t> spectral_cluster(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                                          const SpectralOptions& options = {});

struct FunctionalArea {
    DeviceId owner_gateway{};
    AreaType area_type = AreaType::ComputeOptimized;
    std::vector<DeviceId> members;  // ascending id
    std::size_t cluster_label = 0;

    bool contains(DeviceId id) const;

    friend bool operator==(const FunctionalArea&, const FunctionalArea&) = default;
};

// Every gateway clusters all non-gateway devices into k groups (seed XOR
// gateway position) and keeps the group with the highest mean MIPS or mean
// memory, matching its area type. Throws CapacityError when fewer than k
// non-gateway devices exist.
std::vector<FunctionalArea> cluster_functional_areas(const FogOverlay& overlay, const GatewayAssignment& assignment,
                                                     std::size_t k, std::uint64_t seed,
                                                     const SpectralOptions& options = {});

// JSON array of {gateway, area_type, members}.
std::string serialize_functional_areas(std::span<const FunctionalArea> areas);

} // namespace smartfog
