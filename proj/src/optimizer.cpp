#include "cambrian/optimizer.hpp"

#include <chrono>

#include "cambrian/error.hpp"

namespace cambrian {

const FitnessVector& StepContext::evaluate(Individual& individual, bool candidate)
{
    const auto& f = cambrian::evaluate(individual, db_);
    ++evaluations_;
    if (candidate) {
        ++candidates_;
    }
    if (observer_ != nullptr && *observer_) {
        (*observer_)(generation_, individual);
    }
    return f;
}

void StepContext::offer(const Individual& individual)
{
    if (!individual.fitness) {
        throw ContractError("offer requires an evaluated individual");
    }
    if (auto rule = decode(individual)) {
        archive_.offer(*rule, *individual.fitness);
    }
}

double coverage(const ParetoArchive& archive, const TransactionDB& db)
{
    if (archive.empty() || db.row_count() == 0) {
        return 0.0;
    }
    Bitmap covered(db.row_count());
    for (const auto& e : archive.entries()) {
        covered |= db.item_rows(e.rule.items());
    }
    return static_cast<double>(covered.count()) / static_cast<double>(db.row_count());
}

RunResult run_optimizer(Optimizer& optimizer, const TransactionDB& db, const RunOptions& options)
{
    if (db.row_count() == 0 || db.item_count() < 2) {
        throw ContractError("run needs a database with rows and at least two items");
    }
    using clock = std::chrono::steady_clock;

    Random rng(options.seed);
    RunResult result;
    const EvaluationObserver* observer = options.observer ? &options.observer : nullptr;
    StepContext ctx(db, rng, result.archive, observer);

    ctx.begin_generation(0);
    optimizer.init(ctx);
    result.archive.merge(optimizer.population());

    const auto start = clock::now();
    for (std::size_t g = 1; g <= options.generations; ++g) {
        ctx.begin_generation(g);
        optimizer.step(ctx);

        GenerationStats s;
        s.generation = g;
        s.archive_size = result.archive.size();
        s.coverage = coverage(result.archive, db);
        s.mean = result.archive.mean_fitness();
        s.candidates_evaluated = ctx.candidates();
        s.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        result.stats.push_back(s);
    }
    return result;
}

} // namespace cambrian
