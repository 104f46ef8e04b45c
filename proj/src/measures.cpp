#include "cambrian/measures.hpp"

#include <cmath>

namespace cambrian {

RuleCounts count_rule(const Rule& rule, const TransactionDB& db)
{
    return {db.support_count(rule.antecedent), db.support_count(rule.consequent), db.support_count(rule.items()),
            db.row_count()};
}

FitnessVector fitness_from_counts(const RuleCounts& c)
{
    FitnessVector f;
    const auto joint = static_cast<double>(c.joint);
    f.support = c.rows > 0 ? joint / static_cast<double>(c.rows) : 0.0;
    f.confidence = c.antecedent > 0 ? joint / static_cast<double>(c.antecedent) : 0.0;
    f.cosine = (c.antecedent > 0 && c.consequent > 0)
                   ? joint / std::sqrt(static_cast<double>(c.antecedent) * static_cast<double>(c.consequent))
                   : 0.0;
    return f;
}

FitnessVector evaluate(const std::optional<Rule>& rule, const TransactionDB& db)
{
    if (!rule) {
        return {};
    }
    return fitness_from_counts(count_rule(*rule, db));
}

const FitnessVector& evaluate(Individual& individual, const TransactionDB& db)
{
    individual.fitness = evaluate(decode(individual), db);
    return *individual.fitness;
}

double lift(const Rule& rule, const TransactionDB& db)
{
    const auto c = count_rule(rule, db);
    if (c.antecedent == 0 || c.consequent == 0) {
        return 0.0;
    }
    return (static_cast<double>(c.joint) * static_cast<double>(c.rows))
           / (static_cast<double>(c.antecedent) * static_cast<double>(c.consequent));
}

} // namespace cambrian
