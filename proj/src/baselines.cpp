#include "cambrian/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"

namespace cambrian {

namespace {

std::vector<Individual> random_population(std::size_t size, StepContext& ctx)
{
    std::vector<Individual> pop;
    pop.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        pop.push_back(random_individual(ctx.db().item_count(), ctx.rng()));
        ctx.evaluate(pop.back(), false);
    }
    return pop;
}

std::vector<FitnessVector> fitness_of(std::span<const Individual> pop)
{
    std::vector<FitnessVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) {
        out.push_back(*ind.fitness);
    }
    return out;
}

void require_positive(std::size_t population_size)
{
    if (population_size < 1) {
        throw ConfigError("population_size must be positive");
    }
}

void require_unit(double value, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
    }
}

double objective(const FitnessVector& f, int m)
{
    switch (m) {
    case 0:
        return f.support;
    case 1:
        return f.confidence;
    default:
        return f.cosine;
    }
}

} // namespace

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const FitnessVector> points)
{
    const auto n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated_by_me[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const FitnessVector> points, std::span<const std::size_t> front)
{
    const auto n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (int m = 0; m < 3; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objective(points[front[a]], m) < objective(points[front[b]], m);
        });
        const double lo = objective(points[front[order.front()]], m);
        const double hi = objective(points[front[order.back()]], m);
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double gap = objective(points[front[order[k + 1]]], m) - objective(points[front[order[k - 1]]], m);
            distance[order[k]] += gap / (hi - lo);
        }
    }
    return distance;
}

std::vector<std::size_t> environmental_selection(std::span<const FitnessVector> points, std::size_t keep)
{
    std::vector<std::size_t> survivors;
    for (const auto& front : fast_non_dominated_sort(points)) {
        if (survivors.size() + front.size() <= keep) {
            survivors.insert(survivors.end(), front.begin(), front.end());
            continue;
        }
        const auto crowd = crowding_distance(points, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t k = 0; survivors.size() < keep; ++k) {
            survivors.push_back(front[order[k]]);
        }
        break;
    }
    return survivors;
}

// NSGA-II

Nsga2::Nsga2(std::size_t population_size, Nsga2Params params) : population_size_(population_size), params_(params)
{
    require_positive(population_size);
    require_unit(params.mutation_rate, "nsga2.mutation_rate");
    require_unit(params.crossover_rate, "nsga2.crossover_rate");
}

nlohmann::json Nsga2::config_json() const
{
    return {{"algorithm", "nsga2"},
            {"population_size", population_size_},
            {"mutation_rate", params_.mutation_rate},
            {"crossover_rate", params_.crossover_rate}};
}

void Nsga2::init(StepContext& ctx)
{
    population_ = random_population(population_size_, ctx);
}

std::size_t Nsga2::tournament(const std::vector<std::size_t>& rank, const std::vector<double>& crowd, Random& rng) const
{
    const auto a = rng.index(population_.size());
    const auto b = rng.index(population_.size());
    if (rank[a] != rank[b]) {
        return rank[a] < rank[b] ? a : b;
    }
    if (crowd[a] != crowd[b]) {
        return crowd[a] > crowd[b] ? a : b;
    }
    return rng.coin() ? a : b;
}

void Nsga2::step(StepContext& ctx)
{
    auto& rng = ctx.rng();
    const auto points = fitness_of(population_);
    std::vector<std::size_t> rank(population_.size(), 0);
    std::vector<double> crowd(population_.size(), 0.0);
    const auto fronts = fast_non_dominated_sort(points);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto d = crowding_distance(points, fronts[r]);
        for (std::size_t k = 0; k < fronts[r].size(); ++k) {
            rank[fronts[r][k]] = r;
            crowd[fronts[r][k]] = d[k];
        }
    }

    auto mutate = [&](Genome& g) {
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            if (rng.uniform() < params_.mutation_rate) {
                g[j] = g[j] != 0.0 ? -g[j] : rng.magnitude();
            }
        }
    };

    std::vector<Individual> offspring;
    offspring.reserve(population_size_);
    while (offspring.size() < population_size_) {
        Genome first = population_[tournament(rank, crowd, rng)].genome;
        Genome second = population_[tournament(rank, crowd, rng)].genome;
        if (rng.uniform() < params_.crossover_rate) {
            for (Eigen::Index j = 0; j < first.size(); ++j) {
                if (rng.coin()) {
                    std::swap(first[j], second[j]);
                }
            }
        }
        for (auto* child : {&first, &second}) {
            if (offspring.size() == population_size_) {
                break;
            }
            mutate(*child);
            offspring.emplace_back(std::move(*child));
            ctx.evaluate(offspring.back());
            ctx.offer(offspring.back());
        }
    }

    std::vector<Individual> combined = std::move(population_);
    std::move(offspring.begin(), offspring.end(), std::back_inserter(combined));
    const auto survivors = environmental_selection(fitness_of(combined), population_size_);
    population_.clear();
    for (auto i : survivors) {
        population_.push_back(std::move(combined[i]));
    }
}

// Differential evolution

DifferentialEvolution::DifferentialEvolution(std::size_t population_size, DeParams params)
    : population_size_(population_size), params_(params)
{
    require_positive(population_size);
    require_unit(params.f, "de.f");
    require_unit(params.crossover_rate, "de.crossover_rate");
}

nlohmann::json DifferentialEvolution::config_json() const
{
    return {{"algorithm", "de"},
            {"population_size", population_size_},
            {"f", params_.f},
            {"crossover_rate", params_.crossover_rate}};
}

void DifferentialEvolution::init(StepContext& ctx)
{
    population_ = random_population(population_size_, ctx);
}

void DifferentialEvolution::step(StepContext& ctx)
{
    auto& rng = ctx.rng();
    const auto n = population_.size();
    // Three donors distinct from the target (and each other) when the population allows it.
    auto donors = [&](std::size_t target) {
        std::array<std::size_t, 3> out{};
        if (n < 4) {
            for (auto& d : out) {
                d = rng.index(n);
            }
            return out;
        }
        auto picks = rng.sample(n - 1, 3);
        for (std::size_t k = 0; k < 3; ++k) {
            out[k] = picks[k] >= target ? picks[k] + 1 : picks[k];
        }
        return out;
    };

    std::vector<Individual> trials;
    trials.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [r1, r2, r3] = donors(i);
        const Genome mutant =
            population_[r1].genome + params_.f * (population_[r2].genome - population_[r3].genome);
        Genome trial = population_[i].genome;
        for (Eigen::Index j = 0; j < trial.size(); ++j) {
            if (rng.uniform() < params_.crossover_rate) {
                trial[j] = mutant[j];
            }
        }
        trials.emplace_back(std::move(trial));
        ctx.evaluate(trials.back());
        ctx.offer(trials.back());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dominates(*trials[i].fitness, *population_[i].fitness)) {
            population_[i] = std::move(trials[i]);
        }
    }
}

// Particle swarm

ParticleSwarm::ParticleSwarm(std::size_t population_size, PsoParams params)
    : population_size_(population_size), params_(params)
{
    require_positive(population_size);
    require_unit(params.inertia, "pso.inertia");
    require_unit(params.local_accel, "pso.local_accel");
    require_unit(params.global_accel, "pso.global_accel");
}

nlohmann::json ParticleSwarm::config_json() const
{
    return {{"algorithm", "pso"},
            {"population_size", population_size_},
            {"inertia", params_.inertia},
            {"local_accel", params_.local_accel},
            {"global_accel", params_.global_accel}};
}

void ParticleSwarm::init(StepContext& ctx)
{
    population_ = random_population(population_size_, ctx);
    personal_best_ = population_;
    velocity_.assign(population_.size(), Eigen::VectorXd::Zero(population_.front().genome.size()));
}

void ParticleSwarm::step(StepContext& ctx)
{
    auto& rng = ctx.rng();
    const auto front = non_dominated_filter(std::span<const Individual>(personal_best_));
    const auto dim = population_.front().genome.size();
    auto uniform_vector = [&] {
        Eigen::ArrayXd r(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            r[j] = rng.uniform();
        }
        return r;
    };

    for (std::size_t i = 0; i < population_.size(); ++i) {
        const auto& leader = personal_best_[best_of_front(front, rng)].genome;
        auto& x = population_[i].genome;
        auto& v = velocity_[i];
        const Eigen::ArrayXd r1 = uniform_vector();
        const Eigen::ArrayXd r2 = uniform_vector();
        v = params_.inertia * v
            + (params_.local_accel * r1 * (personal_best_[i].genome - x).array()).matrix()
            + (params_.global_accel * r2 * (leader - x).array()).matrix();
        x += v;
        ctx.evaluate(population_[i]);
        ctx.offer(population_[i]);
        if (dominates(*population_[i].fitness, *personal_best_[i].fitness)) {
            personal_best_[i] = population_[i];
        }
    }
}

// Simulated annealing

SimulatedAnnealing::SimulatedAnnealing(std::size_t population_size, SaParams params)
    : population_size_(population_size), params_(params), temperature_(params.initial_temperature)
{
    require_positive(population_size);
    require_unit(params.alpha, "sa.alpha");
    if (params.max_changes < 1 || params.max_local_search < 1) {
        throw ConfigError("sa.max_changes and sa.max_local_search must be positive");
    }
    if (!(params.initial_temperature > 0.0)) {
        throw ConfigError("sa.initial_temperature must be positive");
    }
}

nlohmann::json SimulatedAnnealing::config_json() const
{
    return {{"algorithm", "sa"},
            {"population_size", population_size_},
            {"alpha", params_.alpha},
            {"max_changes", params_.max_changes},
            {"max_local_search", params_.max_local_search},
            {"initial_temperature", params_.initial_temperature}};
}

void SimulatedAnnealing::init(StepContext& ctx)
{
    population_ = random_population(population_size_, ctx);
    temperature_ = params_.initial_temperature;
}

Individual SimulatedAnnealing::perturb(const Individual& current, std::size_t max_changes, Random& rng)
{
    Individual out(current.genome);
    auto& g = out.genome;
    const auto n = static_cast<std::size_t>(g.size() / 2);
    const auto half = static_cast<Eigen::Index>(n);
    const auto k = rng.between(1, max_changes);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> present;
        std::vector<std::size_t> absent;
        for (std::size_t i = 0; i < n; ++i) {
            (is_present(g, i) ? present : absent).push_back(i);
        }
        const double r = rng.uniform();
        if (r <= 1.0 / 3.0) {
            if (!absent.empty()) {
                const auto item = static_cast<Eigen::Index>(absent[rng.index(absent.size())]);
                g[item] = rng.magnitude();
                g[half + item] = rng.coin() ? rng.magnitude() : -rng.magnitude();
            }
        } else if (r <= 2.0 / 3.0) {
            if (!present.empty()) {
                const auto item = static_cast<Eigen::Index>(present[rng.index(present.size())]);
                g[item] = -std::abs(g[item]);
            }
        } else if (!present.empty()) {
            const auto item = static_cast<Eigen::Index>(present[rng.index(present.size())]);
            g[half + item] = g[half + item] != 0.0 ? -g[half + item] : rng.magnitude();
        }
    }
    return out;
}

void SimulatedAnnealing::step(StepContext& ctx)
{
    auto& rng = ctx.rng();
    const double accept_worse = std::exp(-1.0 / temperature_);
    for (auto& current : population_) {
        for (std::size_t trial = 0; trial < params_.max_local_search; ++trial) {
            auto neighbor = perturb(current, params_.max_changes, rng);
            ctx.evaluate(neighbor);
            ctx.offer(neighbor);
            if (dominates(*neighbor.fitness, *current.fitness) || rng.uniform() < accept_worse) {
                current = std::move(neighbor);
            }
        }
    }
    temperature_ *= params_.alpha;
}

} // namespace cambrian
