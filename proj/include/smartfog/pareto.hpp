#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smartfog {

enum class Sense { Minimize, Maximize };

class ObjectiveVector {
public:
    // Throws ContractError unless values and senses have equal length >= 2
    // and every value is finite.
    ObjectiveVector(std::vector<double> values, std::vector<Sense> senses);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const Sense> senses() const noexcept { return senses_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;

private:
    std::vector<double> values_;
    std::vector<Sense> senses_;
};

// a is no worse than b in every objective and strictly better in one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Front 0 is the non-dominated set. Each front lists input indices ascending.
struct ParetoFronts {
    std::vector<std::vector<std::size_t>> fronts;

    std::size_t rank_of(std::size_t index) const;
};

// Fast non-dominated sorting (domination counts and dominated sets, then
// layer peeling). Throws ContractError on empty or mixed-arity input.
ParetoFronts non_dominated_sort(std::span<const ObjectiveVector> points);

std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> points);

// Non-dominated set built incrementally: each candidate is compared with the
// current archive, evicts the members it dominates and is admitted unless some
// member dominates it. Same result as front 0, by a different route.
std::vector<std::size_t> archive_front(std::span<const ObjectiveVector> points);

} // namespace smartfog
