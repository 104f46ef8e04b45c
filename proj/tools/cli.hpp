#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cambrian/dataset.hpp"

namespace cambrian::cli {

/// Resolved settings for one invocation: config file values overlaid by flags.
struct CliConfig {
    std::string subcommand;
    std::string dataset;
    std::string dataset_id;
    Schema schema;
    BinarizeOptions binarize;
    nlohmann::json algorithms = nlohmann::json::array(); // tags or objects
    nlohmann::json parameters = nlohmann::json::object(); // applied to every algorithm
    std::size_t population_size = 100;
    std::size_t generations = 50;
    std::size_t repetitions = 50;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::size_t jobs = 0; // 0: available cores
    std::set<std::size_t> snapshots;
    std::size_t iterations = 100;
    std::size_t top_k = 10;
};

/// Reads a flat JSON config. Relative dataset and schema paths resolve
/// against the config file's directory.
void apply_config_file(CliConfig& config, const std::string& path);

/// An explicit seed wins over ARM_SEED; with neither the seed is 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed);

/// Loads either a prepared cache or a CSV binarized with the config's schema.
TransactionDB load_dataset(const CliConfig& config);

int run_cli(int argc, const char* const* argv);

} // namespace cambrian::cli
