#pragma once

#include <cstddef>
#include <optional>

#include "cambrian/dataset.hpp"
#include "cambrian/fitness.hpp"
#include "cambrian/rule.hpp"

namespace cambrian {

/// Exact row counts behind every objective.
struct RuleCounts {
    std::size_t antecedent = 0; // rows containing all of A
    std::size_t consequent = 0; // rows containing all of C
    std::size_t joint = 0;      // rows containing all of A and C
    std::size_t rows = 0;
};

RuleCounts count_rule(const Rule& rule, const TransactionDB& db);

/// Objective triple from counts. Zero denominators give zero.
FitnessVector fitness_from_counts(const RuleCounts& counts);

/// An invalid rule (std::nullopt) scores (0, 0, 0).
FitnessVector evaluate(const std::optional<Rule>& rule, const TransactionDB& db);

/// Decodes and caches the fitness on the individual.
const FitnessVector& evaluate(Individual& individual, const TransactionDB& db);

/// (nAC * R) / (nA * nC), or 0 when either side never occurs.
double lift(const Rule& rule, const TransactionDB& db);

} // namespace cambrian
