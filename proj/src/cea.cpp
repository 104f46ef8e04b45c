#include "cambrian/cea.hpp"

#include <cmath>
#include <optional>

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"

namespace cambrian {

namespace {

std::vector<std::size_t> present_items(const Genome& g)
{
    std::vector<std::size_t> out;
    const auto n = static_cast<std::size_t>(g.size() / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (is_present(g, i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> absent_items(const Genome& g)
{
    std::vector<std::size_t> out;
    const auto n = static_cast<std::size_t>(g.size() / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_present(g, i)) {
            out.push_back(i);
        }
    }
    return out;
}

// Keeps the magnitude when it is non-zero, otherwise draws one.
double with_sign(double value, bool positive, Random& rng)
{
    const double magnitude = value != 0.0 ? std::abs(value) : rng.magnitude();
    return positive ? magnitude : -magnitude;
}

void copy_from(Genome& target, const Genome& reference, Random& rng)
{
    const auto candidates = present_items(reference);
    if (candidates.empty()) {
        return;
    }
    const auto item = static_cast<Eigen::Index>(candidates[rng.index(candidates.size())]);
    const auto half = target.size() / 2;
    target[item] = with_sign(target[item], true, rng);
    target[half + item] = with_sign(target[half + item], reference[half + item] > 0.0, rng);
}

} // namespace

void CeaConfig::validate() const
{
    if (population_size < 2) {
        throw ConfigError("cea: population_size must be at least 2");
    }
    if (max_changes < 1 || candidate_cap < 1) {
        throw ConfigError("cea: max_changes and candidate_cap must be positive");
    }
}

Change change_for(double r) noexcept
{
    if (r <= 1.0 / 3.0) {
        return Change::copy_from_reference;
    }
    if (r <= 2.0 / 3.0) {
        return Change::replace_with_reference;
    }
    return Change::add_random;
}

Change apply_change(Genome& target, const Genome& reference, double r, Random& rng)
{
    detail::require(target.size() == reference.size(), "genome lengths differ");
    const auto kind = change_for(r);
    switch (kind) {
    case Change::copy_from_reference:
        copy_from(target, reference, rng);
        break;
    case Change::replace_with_reference: {
        const auto present = present_items(target);
        if (!present.empty()) {
            const auto item = static_cast<Eigen::Index>(present[rng.index(present.size())]);
            target[item] = -std::abs(target[item]);
        }
        copy_from(target, reference, rng);
        break;
    }
    case Change::add_random: {
        const auto absent = absent_items(target);
        if (!absent.empty()) {
            const auto item = static_cast<Eigen::Index>(absent[rng.index(absent.size())]);
            const auto half = target.size() / 2;
            target[item] = with_sign(target[item], true, rng);
            target[half + item] = with_sign(target[half + item], rng.coin(), rng);
        }
        break;
    }
    }
    return kind;
}

Individual improve_individual(const Individual& target, const Individual& reference, std::size_t max_changes,
                              Random& rng)
{
    detail::require(max_changes >= 1, "max_changes must be positive");
    Individual out(target.genome);
    const auto k = rng.between(1, max_changes);
    for (std::size_t i = 0; i < k; ++i) {
        apply_change(out.genome, reference.genome, rng.uniform(), rng);
    }
    return out;
}

void generation_step(std::vector<Individual>& population, StepContext& ctx, const CeaConfig& config)
{
    auto& rng = ctx.rng();
    const auto n_items = ctx.db().item_count();

    for (std::size_t t = 0; t < population.size(); ++t) {
        const auto relations = find_relations(population, t);
        std::optional<Individual> competitor;

        auto consider = [&](Individual candidate, const FitnessVector& must_beat) {
            const auto f = ctx.evaluate(candidate);
            if (dominates(f, must_beat) && (!competitor || dominates(f, *competitor->fitness))) {
                competitor = std::move(candidate);
            }
        };

        if (!relations.dominating.empty()) {
            const auto picks = rng.sample(relations.dominating.size(), config.candidate_cap);
            const auto target_fitness = *population[t].fitness;
            for (auto p : picks) {
                const auto& reference = population[relations.dominating[p]];
                consider(improve_individual(population[t], reference, config.max_changes, rng), target_fitness);
            }
        } else {
            ctx.offer(population[t]);
            const auto picks = rng.sample(relations.dominated.size(), config.candidate_cap);
            for (auto p : picks) {
                const auto& source = population[relations.dominated[p]];
                consider(improve_individual(source, population[t], config.max_changes, rng), *source.fitness);
            }
        }

        if (competitor) {
            population[t] = std::move(*competitor);
        } else {
            population[t] = random_individual(n_items, rng);
            ctx.evaluate(population[t], false);
        }
    }
    ctx.archive().merge(population);
}

CambrianExplosion::CambrianExplosion(CeaConfig config) : config_(config)
{
    config_.validate();
}

nlohmann::json CambrianExplosion::config_json() const
{
    return {{"algorithm", "cea"},
            {"population_size", config_.population_size},
            {"generations", config_.generations},
            {"max_changes", config_.max_changes},
            {"candidate_cap", config_.candidate_cap},
            {"seed", config_.seed}};
}

void CambrianExplosion::init(StepContext& ctx)
{
    population_.clear();
    population_.reserve(config_.population_size);
    for (std::size_t i = 0; i < config_.population_size; ++i) {
        population_.push_back(random_individual(ctx.db().item_count(), ctx.rng()));
        ctx.evaluate(population_.back(), false);
    }
}

void CambrianExplosion::step(StepContext& ctx)
{
    generation_step(population_, ctx, config_);
}

RunResult run(const CeaConfig& config, const TransactionDB& db)
{
    CambrianExplosion cea(config);
    return run_optimizer(cea, db, {config.generations, config.seed, {}});
}

} // namespace cambrian
