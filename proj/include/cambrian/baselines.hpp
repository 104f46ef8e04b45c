#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cambrian/optimizer.hpp"

namespace cambrian {

struct Nsga2Params {
    double mutation_rate = 0.11;
    double crossover_rate = 0.4;
};

struct DeParams {
    double f = 0.08;
    double crossover_rate = 0.72;
};

struct PsoParams {
    double inertia = 0.65;
    double local_accel = 0.38;
    double global_accel = 0.19;
};

struct SaParams {
    double alpha = 0.89;
    std::size_t max_changes = 5;
    std::size_t max_local_search = 10;
    double initial_temperature = 1.0;
};

/// Fronts of increasing rank; front 0 is the non-dominated set.
std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const FitnessVector> points);

/// Crowding distance of each member of `front`, in front order. Boundary
/// points of every objective get +infinity.
std::vector<double> crowding_distance(std::span<const FitnessVector> points, std::span<const std::size_t> front);

/// Survivor selection: whole fronts while they fit, then the last front by
/// descending crowding distance.
std::vector<std::size_t> environmental_selection(std::span<const FitnessVector> points, std::size_t keep);

/// Generational NSGA-II. Parents come from binary tournaments on (rank,
/// crowding); offspring get uniform crossover plus sign-flip mutation, and
/// survivors are chosen elitistically from parents and offspring together.
class Nsga2 final : public Optimizer {
public:
    Nsga2(std::size_t population_size, Nsga2Params params);

    std::string tag() const override { return "nsga2"; }
    nlohmann::json config_json() const override;
    void init(StepContext& ctx) override;
    void step(StepContext& ctx) override;
    std::span<const Individual> population() const override { return population_; }

private:
    std::size_t tournament(const std::vector<std::size_t>& rank, const std::vector<double>& crowd, Random& rng) const;

    std::size_t population_size_;
    Nsga2Params params_;
    std::vector<Individual> population_;
};

/// DE/rand/1/bin. A trial replaces its target only when it dominates it.
class DifferentialEvolution final : public Optimizer {
public:
    DifferentialEvolution(std::size_t population_size, DeParams params);

    std::string tag() const override { return "de"; }
    nlohmann::json config_json() const override;
    void init(StepContext& ctx) override;
    void step(StepContext& ctx) override;
    std::span<const Individual> population() const override { return population_; }

private:
    std::size_t population_size_;
    DeParams params_;
    std::vector<Individual> population_;
};

/// Global-best PSO over the real genomes; decoding reads signs only.
class ParticleSwarm final : public Optimizer {
public:
    ParticleSwarm(std::size_t population_size, PsoParams params);

    std::string tag() const override { return "pso"; }
    nlohmann::json config_json() const override;
    void init(StepContext& ctx) override;
    void step(StepContext& ctx) override;
    std::span<const Individual> population() const override { return population_; }

    std::span<const Individual> personal_bests() const { return personal_best_; }

private:
    std::size_t population_size_;
    PsoParams params_;
    std::vector<Individual> population_;
    std::vector<Individual> personal_best_;
    std::vector<Eigen::VectorXd> velocity_;
};

/// Independent annealing trajectories with geometric cooling.
class SimulatedAnnealing final : public Optimizer {
public:
    SimulatedAnnealing(std::size_t population_size, SaParams params);

    std::string tag() const override { return "sa"; }
    nlohmann::json config_json() const override;
    void init(StepContext& ctx) override;
    void step(StepContext& ctx) override;
    std::span<const Individual> population() const override { return population_; }

    double temperature() const noexcept { return temperature_; }

    /// Neighbor of `current` after K changes, K uniform on [1, max_changes]. A
    /// change toggles one item in or out, or moves a present item to the other side.
    static Individual perturb(const Individual& current, std::size_t max_changes, Random& rng);

private:
    std::size_t population_size_;
    SaParams params_;
    double temperature_;
    std::vector<Individual> population_;
};

} // namespace cambrian
