#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cambrian/fitness.hpp"
#include "cambrian/random.hpp"
#include "cambrian/rule.hpp"

namespace cambrian {

/// a >= b componentwise and a != b.
inline bool dominates(const FitnessVector& a, const FitnessVector& b)
{
    return a.support >= b.support && a.confidence >= b.confidence && a.cosine >= b.cosine && a != b;
}

/// Indices of the points no other point dominates, ascending. Equal
/// non-dominated points are all kept.
std::vector<std::size_t> non_dominated_filter(std::span<const FitnessVector> points);

/// Same, over the cached fitness of each individual.
std::vector<std::size_t> non_dominated_filter(std::span<const Individual> population);

struct ArchiveEntry {
    Rule rule;
    FitnessVector fitness;
};

/// Mutually non-dominated rules accumulated across generations, unique by
/// rule (antecedent and consequent sets). Entries leave only when a newly
/// offered rule dominates them. With a capacity, a full archive rejects
/// newcomers that do not displace anyone.
class ParetoArchive {
public:
    ParetoArchive() = default;
    explicit ParetoArchive(std::optional<std::size_t> capacity) : capacity_(capacity) {}

    /// Returns true when the rule was added.
    bool offer(const Rule& rule, const FitnessVector& fitness);

    /// Offers every valid, evaluated individual.
    void merge(std::span<const Individual> population);

    bool contains(const Rule& rule) const;

    std::span<const ArchiveEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }

    /// Component-wise mean fitness, zero when empty.
    FitnessVector mean_fitness() const;

private:
    std::vector<ArchiveEntry> entries_;
    std::optional<std::size_t> capacity_;
};

ParetoArchive merge(ParetoArchive archive, std::span<const Individual> population);

/// Export: JSON list of serialized rules with fitness.
nlohmann::json archive_to_json(const ParetoArchive& archive, const ItemCatalog* catalog = nullptr);

struct Relations {
    std::vector<std::size_t> dominating; // indices whose fitness dominates the target
    std::vector<std::size_t> dominated;  // indices the target dominates
};

/// Requires every individual to carry a cached fitness.
Relations find_relations(std::span<const Individual> population, std::size_t target);

/// Uniform draw from a non-empty front.
std::size_t best_of_front(std::span<const std::size_t> front, Random& rng);

/// Individual dominated by the most others; ties broken uniformly at random.
std::size_t worst_of_population(std::span<const Individual> population, Random& rng);

} // namespace cambrian
