#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cambrian/baselines.hpp"
#include "cambrian/cea.hpp"

namespace cambrian {

enum class Algorithm { cea, nsga2, de, pso, sa };

Algorithm parse_algorithm(std::string_view tag);
std::string_view to_string(Algorithm algorithm);

/// Resolved configuration for any optimizer the harness can run. Defaults
/// are the benchmark hyperparameters.
struct OptimizerConfig {
    Algorithm algorithm = Algorithm::cea;
    std::size_t population_size = 100;
    std::size_t generations = 50;
    std::uint64_t seed = 0;

    std::size_t max_changes = 5;    // cea
    std::size_t candidate_cap = 10; // cea
    Nsga2Params nsga2;
    DeParams de;
    PsoParams pso;
    SaParams sa;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& config);

RunResult run(const OptimizerConfig& config, const TransactionDB& db, EvaluationObserver observer = {});

/// Names of the [0, 1]-ranged hyperparameters random search may draw.
std::vector<std::string> tunable_parameters(Algorithm algorithm);
void set_parameter(OptimizerConfig& config, std::string_view name, double value);
double get_parameter(const OptimizerConfig& config, std::string_view name);

/// Config dump: run-level fields plus the optimizer's resolved hyperparameters.
nlohmann::json config_to_json(const OptimizerConfig& config);

/// Reads an algorithm entry: either a tag string or an object with "algorithm"
/// and any hyperparameter overrides. Missing fields keep `defaults`.
OptimizerConfig config_from_json(const nlohmann::json& j, const OptimizerConfig& defaults = {});

} // namespace cambrian
