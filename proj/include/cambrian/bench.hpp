#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cambrian/algorithms.hpp"

namespace cambrian {

/// One repetition of one algorithm on one dataset.
struct RunRecord {
    std::string algorithm;
    std::string dataset;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::vector<GenerationStats> generations;
    ParetoArchive archive;
    std::string error; // non-empty when the run failed
};

struct ProtocolOptions {
    std::size_t repetitions = 50;
    std::uint64_t master_seed = 0;          // repetition r runs with master_seed + r
    std::set<std::size_t> snapshot_generations; // 0 is the evaluated initial population
    std::filesystem::path output_dir;       // empty: keep results in memory only
    std::string dataset_id = "dataset";
    std::size_t jobs = 1;
};

/// The snapshot set used for embedding plots: initial state plus 1, 10, 20, 30, 40, 49.
std::set<std::size_t> default_snapshot_generations();

/// Runs every (algorithm, repetition) pair. Records come back ordered by
/// algorithm then repetition regardless of `jobs`. With an output directory,
/// writes metrics_<algo>_<rep>.csv, timing_<algo>_<rep>.csv,
/// front_<algo>_<rep>.json, config_<algo>_<rep>.json and
/// snapshots/<algo>_<rep>_g<gen>.csv.
std::vector<RunRecord> run_protocol(std::span<const OptimizerConfig> algorithms, const TransactionDB& db,
                                    const ProtocolOptions& options);

// File formats. All numbers carry six decimals.
void write_metrics_csv(std::ostream& out, std::span<const GenerationStats> stats);
void write_timing_csv(std::ostream& out, std::span<const GenerationStats> stats);
std::vector<GenerationStats> read_metrics_csv(std::istream& in);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation, 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

struct AlgorithmSummary {
    std::string algorithm;
    std::size_t runs = 0;
    MeanStd archive_size;
    MeanStd coverage;
    MeanStd support;
    MeanStd confidence;
    MeanStd cosine;
};

inline constexpr std::array<std::string_view, 3> rank_metrics{"support", "confidence", "cosine"};

struct RepetitionRank {
    std::size_t repetition = 0;
    std::string algorithm;
    std::string metric;
    std::size_t rank = 0; // 1 = best; ties share the better rank
};

struct BenchSummary {
    std::vector<AlgorithmSummary> algorithms;
    std::vector<RepetitionRank> ranks;
    /// histogram[algorithm][metric][rank - 1] = number of repetitions at that rank
    std::map<std::string, std::map<std::string, std::vector<std::size_t>>> histogram;
};

/// Final-generation statistics per algorithm plus per-repetition ranks.
/// Failed records are skipped.
BenchSummary aggregate_and_rank(std::span<const RunRecord> records);

void write_summary_csv(std::ostream& out, const BenchSummary& summary);
void write_ranks_csv(std::ostream& out, const BenchSummary& summary);

/// Rebuilds records (without archives) from the metrics files of a results directory.
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

struct TuneOptions {
    std::size_t iterations = 100;
    std::size_t generations = 20;
    std::size_t population_size = 100;
    std::size_t top_k = 10;
};

struct TuneTrial {
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;
    double score = 0.0;
};

struct TuneResult {
    OptimizerConfig best;
    double best_score = 0.0;
    std::vector<TuneTrial> trials;
};

/// Sum of support + confidence + cosine over the k archive entries with the
/// largest objective sum (fewer when the archive is smaller).
double top_k_score(const ParetoArchive& archive, std::size_t k = 10);

/// Random search over the algorithm's [0, 1] hyperparameters; the first
/// highest-scoring draw wins.
TuneResult tune_random_search(Algorithm algorithm, const TransactionDB& db, const TuneOptions& options, Random& rng,
                              const OptimizerConfig& base = {});

} // namespace cambrian
