#include "smartfog/pareto.hpp"

#include "smartfog/error.hpp"

#include <algorithm>
#include <cmath>

namespace smartfog {

ObjectiveVector::ObjectiveVector(std::vector<double> values, std::vector<Sense> senses)
    : values_(std::move(values)), senses_(std::move(senses)) {
    if (values_.size() != senses_.size()) {
        throw ContractError("objective values and senses differ in length");
    }
    if (values_.size() < 2) {
        throw ContractError("an objective vector needs at least two objectives");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw ContractError("objective values must be finite");
    }
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size() || !std::equal(a.senses().begin(), a.senses().end(), b.senses().begin())) {
        throw ContractError("dominance between vectors of different shape");
    }
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        const double y = b[i];
        const bool better = a.senses()[i] == Sense::Maximize ? x > y : x < y;
        const bool worse = a.senses()[i] == Sense::Maximize ? x < y : x > y;
        if (worse) {
            return false;
        }
        strictly_better = strictly_better || better;
    }
    return strictly_better;
}

std::size_t ParetoFronts::rank_of(std::size_t index) const {
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        if (std::binary_search(fronts[k].begin(), fronts[k].end(), index)) {
            return k;
        }
    }
    throw ContractError("index not present in any front");
}

namespace {

void check_uniform(std::span<const ObjectiveVector> points) {
    if (points.empty()) {
        throw ContractError("non-dominated sorting of an empty set");
    }
    const auto& first = points.front();
    for (const auto& p : points) {
        if (p.size() != first.size() || !std::equal(p.senses().begin(), p.senses().end(), first.senses().begin())) {
            throw ContractError("points differ in arity or senses");
        }
    }
}

} // namespace

ParetoFronts non_dominated_sort(std::span<const ObjectiveVector> points) {
    check_uniform(points);
    const std::size_t n = points.size();
    std::vector<std::size_t> dominated_by_count(n, 0);
    std::vector<std::vector<std::size_t>> dominated_set(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated_set[p].push_back(q);
                ++dominated_by_count[q];
            } else if (dominates(points[q], points[p])) {
                dominated_set[q].push_back(p);
                ++dominated_by_count[p];
            }
        }
    }

    ParetoFronts out;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        if (dominated_by_count[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const auto p : current) {
            for (const auto q : dominated_set[p]) {
                if (--dominated_by_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        out.fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return out;
}

std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> points) {
    return non_dominated_sort(points).fronts.front();
}

std::vector<std::size_t> archive_front(std::span<const ObjectiveVector> points) {
    check_uniform(points);
    std::vector<std::size_t> archive{0};
    for (std::size_t f = 1; f < points.size(); ++f) {
        bool dominated = false;
        std::erase_if(archive, [&](std::size_t q) {
            if (dominated) {
                return false;
            }
            if (dominates(points[q], points[f])) {
                dominated = true;
                return false;
            }
            return dominates(points[f], points[q]);
        });
        if (!dominated) {
            archive.push_back(f);
        }
    }
    std::sort(archive.begin(), archive.end());
    return archive;
}

} // namespace smartfog
