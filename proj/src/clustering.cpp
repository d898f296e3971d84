#include "smartfog/clustering.hpp"

#include "smartfog/error.hpp"
#include "smartfog/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace smartfog {

FeatureMatrix build_features(std::span<const FogDevice> devices) {
    FeatureMatrix out;
    out.values = DenseMatrix(devices.size(), 2);
    for (std::size_t i = 0; i < devices.size(); ++i) {
        out.values(i, 0) = devices[i].mips;
        out.values(i, 1) = devices[i].memory_gb;
        out.devices.push_back(devices[i].id);
    }
    const auto n = static_cast<double>(devices.size());
    for (std::size_t c = 0; c < 2 && !devices.empty(); ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < devices.size(); ++i) {
            mean += out.values(i, c);
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < devices.size(); ++i) {
            var += (out.values(i, c) - mean) * (out.values(i, c) - mean);
        }
        const double sd = std::sqrt(var / n);
        for (std::size_t i = 0; i < devices.size(); ++i) {
            out.values(i, c) = sd > 0.0 ? (out.values(i, c) - mean) / sd : 0.0;
        }
    }
    return out;
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += (x[i] - y[i]) * (x[i] - y[i]);
    }
    return sum;
}

} // namespace

SimilarityMatrix similarity_matrix(const FeatureMatrix& features, double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw ConfigError("Gaussian bandwidth must be positive");
    }
    const std::size_t n = features.values.rows();
    if (n < 2) {
        throw ContractError("similarity matrix needs at least two devices");
    }
    SimilarityMatrix out{DenseMatrix(n, n), bandwidth};
    const double denom = 2.0 * bandwidth * bandwidth;
    for (std::size_t i = 0; i < n; ++i) {
        out.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = std::exp(-squared_distance(features.values.row(i), features.values.row(j)) / denom);
            out.values(i, j) = out.values(j, i) = s;
        }
    }
    return out;
}

double median_distance_bandwidth(const FeatureMatrix& features) {
    const std::size_t n = features.values.rows();
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d.push_back(std::sqrt(squared_distance(features.values.row(i), features.values.row(j))));
        }
    }
    if (d.empty()) {
        return 1.0;
    }
    std::sort(d.begin(), d.end());
    const double median = d.size() % 2 == 1 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
    return median > 0.0 ? median : 1.0;
}

DenseMatrix normalized_laplacian(const DenseMatrix& affinity) {
    const std::size_t n = affinity.rows();
    if (affinity.cols() != n) {
        throw ContractError("affinity matrix must be square");
    }
    std::vector<double> inv_sqrt_degree(n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            degree += affinity(i, j);
        }
        if (!(degree > 0.0)) {
            throw ContractError("affinity matrix has an isolated row");
        }
        inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
    }
    DenseMatrix lap(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            lap(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt_degree[i] * affinity(i, j) * inv_sqrt_degree[j];
        }
    }
    return lap;
}

SpectralEmbedding spectral_embed(const DenseMatrix& affinity, std::size_t k) {
    const std::size_t n = affinity.rows();
    if (k < 1 || k > n) {
        throw ContractError("embedding dimension must lie in [1, n]");
    }
    const auto eig = jacobi_eigen(normalized_laplacian(affinity));
    SpectralEmbedding out;
    out.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(k));
    out.eigenvectors = DenseMatrix(n, k);
    out.rows = DenseMatrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            out.eigenvectors(i, j) = eig.vectors(i, j);
            norm += eig.vectors(i, j) * eig.vectors(i, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < k; ++j) {
            out.rows(i, j) = norm > 0.0 ? eig.vectors(i, j) / norm : 0.0;
        }
    }
    return out;
}

double clustering_cost(const DenseMatrix& points, std::span<const std::size_t> labels, std::size_t k) {
    const std::size_t dim = points.cols();
    DenseMatrix centroid(k, dim);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        ++count[labels[i]];
        for (std::size_t d = 0; d < dim; ++d) {
            centroid(labels[i], d) += points(i, d);
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < dim && count[c] > 0; ++d) {
            centroid(c, d) /= static_cast<double>(count[c]);
        }
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        cost += squared_distance(points.row(i), centroid.row(labels[i]));
    }
    return cost;
}

namespace {

DenseMatrix seed_centers(const DenseMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    DenseMatrix centers(k, points.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t pick = rng.index(n);
    for (std::size_t c = 0; c < k; ++c) {
        chosen[pick] = true;
        std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
        if (c + 1 == k) {
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centers.row(c)));
            total += nearest[i];
        }
        if (total > 0.0) {
            double target = rng.uniform01() * total;
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (nearest[i] <= 0.0) {
                    continue;
                }
                pick = i;
                target -= nearest[i];
                if (target < 0.0) {
                    break;
                }
            }
        } else {
            // All remaining points coincide with a center; take any unchosen one.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    free.push_back(i);
                }
            }
            pick = free[rng.index(free.size())];
        }
    }
    return centers;
}

std::vector<std::size_t> canonical_labels(std::span<const std::size_t> labels, std::size_t k) {
    std::vector<std::size_t> remap(k, k);
    std::size_t next = 0;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (remap[labels[i]] == k) {
            remap[labels[i]] = next++;
        }
        out[i] = remap[labels[i]];
    }
    return out;
}

KMeansResult lloyd(const DenseMatrix& points, std::size_t k, Rng& rng, int max_iterations) {
    const std::size_t n = points.rows();
    const std::size_t dim = points.cols();
    DenseMatrix centers = seed_centers(points, k, rng);
    std::vector<std::size_t> labels(n, k);
    int iteration = 0;
    while (iteration < max_iterations) {
        ++iteration;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(points.row(i), centers.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points.row(i), centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }

        std::vector<std::size_t> count(k, 0);
        for (const auto l : labels) {
            ++count[l];
        }
        // Refill empty clusters with the point farthest from its own centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] != 0) {
                continue;
            }
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (count[labels[i]] < 2) {
                    continue;
                }
                const double d = squared_distance(points.row(i), centers.row(labels[i]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --count[labels[far]];
            labels[far] = c;
            count[c] = 1;
            changed = true;
        }

        if (!changed) {
            break;
        }
        centers = DenseMatrix(k, dim);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                centers(labels[i], d) += points(i, d);
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t d = 0; d < dim; ++d) {
                centers(c, d) /= static_cast<double>(count[c]);
            }
        }
    }
    KMeansResult out;
    out.cost = clustering_cost(points, labels, k);
    out.labels = canonical_labels(labels, k);
    out.iterations = iteration;
    return out;
}

} // namespace

KMeansResult k_means(const DenseMatrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    if (k < 1 || k > points.rows()) {
        throw ContractError("k-means needs 1 <= k <= number of points");
    }
    if (options.max_iterations < 1 || options.restarts < 1) {
        throw ConfigError("k-means needs positive iteration and restart counts");
    }
    KMeansResult best;
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto result = lloyd(points, k, rng, options.max_iterations);
        if (r == 0 || result.cost < best.cost) {
            best = std::move(result);
        }
    }
    return best;
}

std::vector<std::size_t> spectral_cluster(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                                          const SpectralOptions& options) {
    const double bandwidth = options.bandwidth ? *options.bandwidth : median_distance_bandwidth(features);
    const auto similarity = similarity_matrix(features, bandwidth);
    const auto embedding = spectral_embed(similarity.values, k);
    return k_means(embedding.rows, k, seed, options.k_means).labels;
}

bool FunctionalArea::contains(DeviceId id) const {
    return std::binary_search(members.begin(), members.end(), id,
                              [](DeviceId x, DeviceId y) { return raw(x) < raw(y); });
}

std::vector<FunctionalArea> cluster_functional_areas(const FogOverlay& overlay, const GatewayAssignment& assignment,
                                                     std::size_t k, std::uint64_t seed,
                                                     const SpectralOptions& options) {
    if (k < 1) {
        throw ContractError("at least one cluster is required");
    }
    for (const auto& g : assignment.gateways) {
        if (!overlay.contains(g.device)) {
            throw ContractError("gateway " + std::to_string(raw(g.device)) + " not in overlay");
        }
    }
    std::vector<FogDevice> candidates;
    for (const auto& d : overlay.devices()) {
        if (!assignment.is_gateway(d.id)) {
            candidates.push_back(d);
        }
    }
    if (candidates.size() < k) {
        throw CapacityError("only " + std::to_string(candidates.size()) + " non-gateway devices for " +
                            std::to_string(k) + " clusters");
    }

    const auto features = build_features(candidates);
    std::vector<FunctionalArea> areas;
    for (std::size_t gi = 0; gi < assignment.gateways.size(); ++gi) {
        const auto& gateway = assignment.gateways[gi];
        std::vector<std::size_t> labels;
        if (candidates.size() == 1) {
            labels.assign(1, 0);
        } else {
            labels = spectral_cluster(features, k, seed ^ gi, options);
        }

        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            sum[labels[i]] += gateway.area == AreaType::ComputeOptimized ? candidates[i].mips : candidates[i].memory_gb;
            ++count[labels[i]];
        }
        std::size_t chosen = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (sum[c] / static_cast<double>(count[c]) > sum[chosen] / static_cast<double>(count[chosen])) {
                chosen = c;
            }
        }

        FunctionalArea area{gateway.device, gateway.area, {}, chosen};
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (labels[i] == chosen) {
                area.members.push_back(candidates[i].id);
            }
        }
        areas.push_back(std::move(area));
    }
    return areas;
}

std::string serialize_functional_areas(std::span<const FunctionalArea> areas) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& a : areas) {
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (const auto id : a.members) {
            members.push_back(raw(id));
        }
        doc.push_back({{"gateway", raw(a.owner_gateway)}, {"area_type", to_string(a.area_type)}, {"members", members}});
    }
    return doc.dump(2) + "\n";
}

} // namespace smartfog
