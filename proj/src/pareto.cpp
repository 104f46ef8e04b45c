#include "cambrian/pareto.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"

namespace cambrian {

namespace {

const FitnessVector& fitness_of(const Individual& individual)
{
    if (!individual.fitness) {
        throw ContractError("individual has no cached fitness");
    }
    return *individual.fitness;
}

} // namespace

std::vector<std::size_t> non_dominated_filter(std::span<const FitnessVector> points)
{
    // Sort by support descending so a dominator always precedes what it dominates,
    // then compare each point only against the front built so far.
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = points[a];
        const auto& pb = points[b];
        if (pa.support != pb.support) {
            return pa.support > pb.support;
        }
        if (pa.confidence != pb.confidence) {
            return pa.confidence > pb.confidence;
        }
        return pa.cosine > pb.cosine;
    });

    std::vector<std::size_t> front;
    for (auto i : order) {
        const bool dominated = std::any_of(front.begin(), front.end(),
                                           [&](std::size_t f) { return dominates(points[f], points[i]); });
        if (!dominated) {
            front.push_back(i);
        }
    }
    std::sort(front.begin(), front.end());
    return front;
}

std::vector<std::size_t> non_dominated_filter(std::span<const Individual> population)
{
    std::vector<FitnessVector> points;
    points.reserve(population.size());
    for (const auto& ind : population) {
        points.push_back(fitness_of(ind));
    }
    return non_dominated_filter(points);
}

bool ParetoArchive::contains(const Rule& rule) const
{
    return std::any_of(entries_.begin(), entries_.end(), [&](const ArchiveEntry& e) { return e.rule == rule; });
}

bool ParetoArchive::offer(const Rule& rule, const FitnessVector& fitness)
{
    for (const auto& e : entries_) {
        if (e.rule == rule || dominates(e.fitness, fitness)) {
            return false;
        }
    }
    const auto before = entries_.size();
    std::erase_if(entries_, [&](const ArchiveEntry& e) { return dominates(fitness, e.fitness); });
    if (capacity_ && entries_.size() == before && entries_.size() >= *capacity_) {
        return false;
    }
    entries_.push_back({rule, fitness});
    return true;
}

void ParetoArchive::merge(std::span<const Individual> population)
{
    for (const auto& ind : population) {
        if (!ind.fitness) {
            throw ContractError("merge requires evaluated individuals");
        }
        if (auto rule = decode(ind)) {
            offer(*rule, *ind.fitness);
        }
    }
}

FitnessVector ParetoArchive::mean_fitness() const
{
    if (entries_.empty()) {
        return {};
    }
    Eigen::Array3d total = Eigen::Array3d::Zero();
    for (const auto& e : entries_) {
        total += e.fitness.array();
    }
    total /= static_cast<double>(entries_.size());
    return {total[0], total[1], total[2]};
}

ParetoArchive merge(ParetoArchive archive, std::span<const Individual> population)
{
    archive.merge(population);
    return archive;
}

nlohmann::json archive_to_json(const ParetoArchive& archive, const ItemCatalog* catalog)
{
    auto out = nlohmann::json::array();
    for (const auto& e : archive.entries()) {
        out.push_back(rule_to_json(e.rule, e.fitness, catalog));
    }
    return out;
}

Relations find_relations(std::span<const Individual> population, std::size_t target)
{
    detail::require(target < population.size(), "target index out of range");
    Relations rel;
    const auto& t = fitness_of(population[target]);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const auto& f = fitness_of(population[i]);
        if (i == target) {
            continue;
        }
        if (dominates(f, t)) {
            rel.dominating.push_back(i);
        } else if (dominates(t, f)) {
            rel.dominated.push_back(i);
        }
    }
    return rel;
}

std::size_t best_of_front(std::span<const std::size_t> front, Random& rng)
{
    detail::require(!front.empty(), "best_of_front needs a non-empty front");
    return front[rng.index(front.size())];
}

std::size_t worst_of_population(std::span<const Individual> population, Random& rng)
{
    detail::require(!population.empty(), "worst_of_population needs a non-empty population");
    std::vector<std::size_t> dominators(population.size(), 0);
    for (std::size_t i = 0; i < population.size(); ++i) {
        for (std::size_t j = 0; j < population.size(); ++j) {
            if (i != j && dominates(fitness_of(population[j]), fitness_of(population[i]))) {
                ++dominators[i];
            }
        }
    }
    const auto most = *std::max_element(dominators.begin(), dominators.end());
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < dominators.size(); ++i) {
        if (dominators[i] == most) {
            ties.push_back(i);
        }
    }
    return ties[rng.index(ties.size())];
}

} // namespace cambrian
