#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cambrian/dataset.hpp"
#include "cambrian/measures.hpp"
#include "cambrian/pareto.hpp"
#include "cambrian/random.hpp"
#include "cambrian/rule.hpp"

namespace cambrian {

/// Per-generation record shared by every optimizer, one per step starting at
/// generation 1. Generation 0 (the evaluated initial population) only reaches
/// observers.
struct GenerationStats {
    std::size_t generation = 0;
    std::size_t archive_size = 0;
    double coverage = 0.0;
    FitnessVector mean;
    std::size_t candidates_evaluated = 0;
    double elapsed_ms = 0.0;
};

/// Called with (generation, individual) for every fitness evaluation.
using EvaluationObserver = std::function<void(std::size_t, const Individual&)>;

/// Everything one generation needs besides the optimizer's own state.
class StepContext {
public:
    StepContext(const TransactionDB& db, Random& rng, ParetoArchive& archive, const EvaluationObserver* observer = nullptr)
        : db_(db), rng_(rng), archive_(archive), observer_(observer) {}

    const TransactionDB& db() const noexcept { return db_; }
    Random& rng() noexcept { return rng_; }
    ParetoArchive& archive() noexcept { return archive_; }

    /// Evaluates and caches fitness. Candidates count toward candidates_evaluated.
    const FitnessVector& evaluate(Individual& individual, bool candidate = true);

    /// Offers a valid evaluated individual to the archive.
    void offer(const Individual& individual);

    std::size_t candidates() const noexcept { return candidates_; }
    std::size_t evaluations() const noexcept { return evaluations_; }
    void begin_generation(std::size_t generation) noexcept
    {
        generation_ = generation;
        candidates_ = 0;
        evaluations_ = 0;
    }

private:
    const TransactionDB& db_;
    Random& rng_;
    ParetoArchive& archive_;
    const EvaluationObserver* observer_;
    std::size_t generation_ = 0;
    std::size_t candidates_ = 0;
    std::size_t evaluations_ = 0;
};

class Optimizer {
public:
    virtual ~Optimizer() = default;

    virtual std::string tag() const = 0;

    /// Resolved hyperparameters, for provenance.
    virtual nlohmann::json config_json() const = 0;

    /// Builds and evaluates the initial population.
    virtual void init(StepContext& ctx) = 0;

    /// One generation. Must leave the population size unchanged.
    virtual void step(StepContext& ctx) = 0;

    virtual std::span<const Individual> population() const = 0;
};

struct RunOptions {
    std::size_t generations = 50;
    std::uint64_t seed = 0;
    EvaluationObserver observer;
};

struct RunResult {
    ParetoArchive archive;
    std::vector<GenerationStats> stats; // one row per generation step, 1-based
};

/// Initializes, merges the initial population into an empty archive, then runs
/// `generations` steps. Reproducible from options.seed.
RunResult run_optimizer(Optimizer& optimizer, const TransactionDB& db, const RunOptions& options);

/// Fraction of rows containing every item of at least one archived rule.
double coverage(const ParetoArchive& archive, const TransactionDB& db);

} // namespace cambrian
