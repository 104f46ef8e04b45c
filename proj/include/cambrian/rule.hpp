#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "cambrian/dataset.hpp"
#include "cambrian/fitness.hpp"
#include "cambrian/random.hpp"

namespace cambrian {

/// Genome of length 2N. Entry i > 0 marks item i present; for a present item,
/// entry N + i > 0 puts it in the antecedent, otherwise in the consequent.
/// Only signs carry meaning.
using Genome = Eigen::VectorXd;

/// Decoded association rule A => C. Both sides are sorted and disjoint, and neither is empty.
struct Rule {
    std::vector<ItemIndex> antecedent;
    std::vector<ItemIndex> consequent;

    /// Sorted union of both sides.
    std::vector<ItemIndex> items() const;

    friend bool operator==(const Rule&, const Rule&) = default;
    friend auto operator<=>(const Rule&, const Rule&) = default;
};

struct Individual {
    Genome genome;
    std::optional<FitnessVector> fitness;

    Individual() = default;
    explicit Individual(Genome g) : genome(std::move(g)) {}

    std::size_t item_count() const noexcept { return static_cast<std::size_t>(genome.size() / 2); }
};

inline bool is_present(const Genome& g, std::size_t item) { return g[static_cast<Eigen::Index>(item)] > 0.0; }
inline bool in_antecedent(const Genome& g, std::size_t item)
{
    return g[static_cast<Eigen::Index>(g.size() / 2 + static_cast<Eigen::Index>(item))] > 0.0;
}

/// Returns std::nullopt when either side of the rule would be empty.
std::optional<Rule> decode(const Genome& genome);
inline std::optional<Rule> decode(const Individual& individual) { return decode(individual.genome); }

/// Fresh individual encoding a uniformly chosen 1 => 1 rule over two distinct items.
/// Requires n >= 2.
Individual random_individual(std::size_t n, Random& rng);

/// Genome for an explicit rule; magnitudes drawn from (0, 1]. Handy for tests and tooling.
Genome encode(const Rule& rule, std::size_t n, Random& rng);

/// {antecedent, consequent, support, confidence, cosine}; labels are resolved
/// through the catalog dump when one is given.
nlohmann::json rule_to_json(const Rule& rule, const FitnessVector& fitness, const ItemCatalog* catalog = nullptr);
Rule rule_from_json(const nlohmann::json& j);

} // namespace cambrian
