#include "cambrian/algorithms.hpp"

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"

namespace cambrian {

namespace {

double* parameter_address(OptimizerConfig& c, std::string_view name)
{
    switch (c.algorithm) {
    case Algorithm::nsga2:
        if (name == "mutation_rate") return &c.nsga2.mutation_rate;
        if (name == "crossover_rate") return &c.nsga2.crossover_rate;
        break;
    case Algorithm::de:
        if (name == "f") return &c.de.f;
        if (name == "crossover_rate") return &c.de.crossover_rate;
        break;
    case Algorithm::pso:
        if (name == "inertia") return &c.pso.inertia;
        if (name == "local_accel") return &c.pso.local_accel;
        if (name == "global_accel") return &c.pso.global_accel;
        break;
    case Algorithm::sa:
        if (name == "alpha") return &c.sa.alpha;
        break;
    case Algorithm::cea:
        break;
    }
    throw ConfigError(std::string(to_string(c.algorithm)) + ": unknown parameter '" + std::string(name) + "'");
}

} // namespace

Algorithm parse_algorithm(std::string_view tag)
{
    if (tag == "cea") return Algorithm::cea;
    if (tag == "nsga2") return Algorithm::nsga2;
    if (tag == "de") return Algorithm::de;
    if (tag == "pso") return Algorithm::pso;
    if (tag == "sa") return Algorithm::sa;
    throw ConfigError("unknown algorithm '" + std::string(tag) + "' (expected cea, nsga2, de, pso or sa)");
}

std::string_view to_string(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::cea: return "cea";
    case Algorithm::nsga2: return "nsga2";
    case Algorithm::de: return "de";
    case Algorithm::pso: return "pso";
    case Algorithm::sa: return "sa";
    }
    return "?";
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& c)
{
    switch (c.algorithm) {
    case Algorithm::cea:
        return std::make_unique<CambrianExplosion>(
            CeaConfig{c.population_size, c.generations, c.max_changes, c.candidate_cap, c.seed});
    case Algorithm::nsga2:
        return std::make_unique<Nsga2>(c.population_size, c.nsga2);
    case Algorithm::de:
        return std::make_unique<DifferentialEvolution>(c.population_size, c.de);
    case Algorithm::pso:
        return std::make_unique<ParticleSwarm>(c.population_size, c.pso);
    case Algorithm::sa:
        return std::make_unique<SimulatedAnnealing>(c.population_size, c.sa);
    }
    throw ConfigError("unknown algorithm");
}

RunResult run(const OptimizerConfig& config, const TransactionDB& db, EvaluationObserver observer)
{
    auto optimizer = make_optimizer(config);
    return run_optimizer(*optimizer, db, {config.generations, config.seed, std::move(observer)});
}

std::vector<std::string> tunable_parameters(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::nsga2: return {"mutation_rate", "crossover_rate"};
    case Algorithm::de: return {"f", "crossover_rate"};
    case Algorithm::pso: return {"inertia", "local_accel", "global_accel"};
    case Algorithm::sa: return {"alpha"};
    case Algorithm::cea: return {};
    }
    return {};
}

void set_parameter(OptimizerConfig& config, std::string_view name, double value)
{
    *parameter_address(config, name) = value;
}

double get_parameter(const OptimizerConfig& config, std::string_view name)
{
    auto copy = config;
    return *parameter_address(copy, name);
}

nlohmann::json config_to_json(const OptimizerConfig& config)
{
    auto j = make_optimizer(config)->config_json();
    j["generations"] = config.generations;
    j["seed"] = config.seed;
    return j;
}

OptimizerConfig config_from_json(const nlohmann::json& j, const OptimizerConfig& defaults)
{
    OptimizerConfig c = defaults;
    if (j.is_string()) {
        c.algorithm = parse_algorithm(j.get<std::string>());
        return c;
    }
    if (!j.is_object() || !j.contains("algorithm")) {
        throw ConfigError("algorithm entry must be a tag or an object with an \"algorithm\" field");
    }
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "algorithm") {
            continue;
        }
        if (key == "population_size") {
            c.population_size = value.get<std::size_t>();
        } else if (key == "generations") {
            c.generations = value.get<std::size_t>();
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "max_changes") {
            c.max_changes = value.get<std::size_t>();
            c.sa.max_changes = c.max_changes;
        } else if (key == "candidate_cap") {
            c.candidate_cap = value.get<std::size_t>();
        } else if (key == "max_local_search") {
            c.sa.max_local_search = value.get<std::size_t>();
        } else if (key == "initial_temperature") {
            c.sa.initial_temperature = value.get<double>();
        } else {
            set_parameter(c, key, value.get<double>());
        }
    }
    return c;
}

} // namespace cambrian
