#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cambrian/optimizer.hpp"

namespace cambrian {

struct CeaConfig {
    std::size_t population_size = 100;
    std::size_t generations = 50;
    std::size_t max_changes = 5;    // upper bound on changes per improvement
    std::size_t candidate_cap = 10; // improvement candidates per target
    std::uint64_t seed = 0;

    void validate() const;
};

/// The three change kinds of the improvement operator, selected by r on
/// [0, 1) with thresholds 1/3 and 2/3.
enum class Change { copy_from_reference, replace_with_reference, add_random };

Change change_for(double r) noexcept;

/// Applies one change to `target`, with r already drawn. Sub-steps that have
/// nothing to act on (no present item to copy or remove, no absent item to
/// add) are skipped.
Change apply_change(Genome& target, const Genome& reference, double r, Random& rng);

/// New individual after K changes, K uniform on [1, max_changes]; the target is
/// not modified and the result carries no fitness.
Individual improve_individual(const Individual& target, const Individual& reference, std::size_t max_changes,
                              Random& rng);

/// One generation over `population` (every member evaluated). Targets are
/// visited in order and replaced in place, so later targets see earlier
/// replacements. Non-dominated targets are offered to the archive before they
/// are replaced; the whole population is merged afterwards.
void generation_step(std::vector<Individual>& population, StepContext& ctx, const CeaConfig& config);

class CambrianExplosion final : public Optimizer {
public:
    explicit CambrianExplosion(CeaConfig config);

    std::string tag() const override { return "cea"; }
    nlohmann::json config_json() const override;
    void init(StepContext& ctx) override;
    void step(StepContext& ctx) override;
    std::span<const Individual> population() const override { return population_; }

    const CeaConfig& config() const noexcept { return config_; }

private:
    CeaConfig config_;
    std::vector<Individual> population_;
};

RunResult run(const CeaConfig& config, const TransactionDB& db);

} // namespace cambrian
