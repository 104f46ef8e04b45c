#include "cambrian/rule.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"

namespace cambrian {

std::vector<ItemIndex> Rule::items() const
{
    std::vector<ItemIndex> out;
    out.reserve(antecedent.size() + consequent.size());
    std::merge(antecedent.begin(), antecedent.end(), consequent.begin(), consequent.end(), std::back_inserter(out));
    return out;
}

std::optional<Rule> decode(const Genome& genome)
{
    const auto n = static_cast<std::size_t>(genome.size() / 2);
    Rule rule;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_present(genome, i)) {
            continue;
        }
        (in_antecedent(genome, i) ? rule.antecedent : rule.consequent).push_back(static_cast<ItemIndex>(i));
    }
    if (rule.antecedent.empty() || rule.consequent.empty()) {
        return std::nullopt;
    }
    return rule;
}

Individual random_individual(std::size_t n, Random& rng)
{
    detail::require(n >= 2, "random_individual needs at least two items");
    Genome g(static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        g[static_cast<Eigen::Index>(i)] = -rng.magnitude();
    }
    for (std::size_t i = n; i < 2 * n; ++i) {
        g[static_cast<Eigen::Index>(i)] = rng.coin() ? rng.magnitude() : -rng.magnitude();
    }
    const auto pick = rng.sample(n, 2);
    const auto a = static_cast<Eigen::Index>(pick[0]);
    const auto c = static_cast<Eigen::Index>(pick[1]);
    const auto half = static_cast<Eigen::Index>(n);
    g[a] = std::abs(g[a]);
    g[c] = std::abs(g[c]);
    g[half + a] = std::abs(g[half + a]);
    g[half + c] = -std::abs(g[half + c]);
    return Individual(std::move(g));
}

Genome encode(const Rule& rule, std::size_t n, Random& rng)
{
    Genome g(static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < 2 * n; ++i) {
        g[static_cast<Eigen::Index>(i)] = -rng.magnitude();
    }
    const auto half = static_cast<Eigen::Index>(n);
    for (auto i : rule.antecedent) {
        detail::require(i < n, "rule item out of range");
        g[i] = -g[i];
        g[half + i] = -g[half + i];
    }
    for (auto i : rule.consequent) {
        detail::require(i < n, "rule item out of range");
        g[i] = -g[i];
    }
    return g;
}

nlohmann::json rule_to_json(const Rule& rule, const FitnessVector& fitness, const ItemCatalog* catalog)
{
    nlohmann::json j{{"antecedent", rule.antecedent},
                     {"consequent", rule.consequent},
                     {"support", fitness.support},
                     {"confidence", fitness.confidence},
                     {"cosine", fitness.cosine}};
    if (catalog != nullptr) {
        auto labels = [&](const std::vector<ItemIndex>& side) {
            std::vector<std::string> out;
            for (auto i : side) {
                out.push_back(catalog->describe(i));
            }
            return out;
        };
        j["antecedent_labels"] = labels(rule.antecedent);
        j["consequent_labels"] = labels(rule.consequent);
    }
    return j;
}

Rule rule_from_json(const nlohmann::json& j)
{
    Rule r{j.at("antecedent").get<std::vector<ItemIndex>>(), j.at("consequent").get<std::vector<ItemIndex>>()};
    std::sort(r.antecedent.begin(), r.antecedent.end());
    std::sort(r.consequent.begin(), r.consequent.end());
    return r;
}

} // namespace cambrian
