#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cambrian/algorithms.hpp"
#include "cambrian/bench.hpp"
#include "cambrian/error.hpp"

namespace cambrian::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

std::string resolve_against(const fs::path& base, const std::string& path)
{
    const fs::path p(path);
    return p.is_absolute() ? path : (base / p).lexically_normal().string();
}

std::set<std::size_t> snapshots_from_json(const json& j)
{
    if (j.is_boolean()) {
        return j.get<bool>() ? default_snapshot_generations() : std::set<std::size_t>{};
    }
    const auto gens = j.get<std::vector<std::size_t>>();
    return {gens.begin(), gens.end()};
}

void require_positive(std::size_t value, const char* name)
{
    if (value == 0) {
        throw ConfigError(std::string(name) + " must be positive");
    }
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

/// Options shared by every subcommand that reads a dataset. Values land in
/// the raw fields and are copied onto the config only when given.
struct DatasetFlags {
    std::string config_path;
    std::string dataset;
    std::string schema_path;
    std::vector<std::string> continuous;
    std::vector<std::string> categorical;
    std::vector<std::string> ignore;
    std::size_t bins = 10;
    std::string missing;
    CLI::Option* bins_opt = nullptr;
    CLI::Option* missing_opt = nullptr;
    CLI::Option* keep_empty_opt = nullptr;

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path, "flat JSON config; flags override its values")
            ->check(CLI::ExistingFile);
        app.add_option("--dataset", dataset, "CSV file or a cache written by prepare");
        app.add_option("--schema", schema_path, "JSON schema: {\"columns\":{name:kind},\"ignore\":[...]}");
        app.add_option("--continuous", continuous, "columns to treat as continuous")->delimiter(',');
        app.add_option("--categorical", categorical, "columns to treat as categorical")->delimiter(',');
        app.add_option("--ignore", ignore, "columns to drop")->delimiter(',');
        bins_opt = app.add_option("--bins", bins, "equal-width bins per continuous column");
        missing_opt = app.add_option("--missing", missing, "missing-value marker");
        keep_empty_opt = app.add_flag("--keep-empty-bins", "emit an item for bins no row falls in");
    }

    void apply(CliConfig& c) const
    {
        if (!config_path.empty()) {
            apply_config_file(c, config_path);
        }
        if (!dataset.empty()) {
            c.dataset = dataset;
        }
        if (!schema_path.empty()) {
            c.schema = schema_from_json(read_json_file(schema_path));
        }
        for (const auto& name : continuous) {
            c.schema.kinds[name] = ColumnKind::continuous;
        }
        for (const auto& name : categorical) {
            c.schema.kinds[name] = ColumnKind::categorical;
        }
        c.schema.ignored.insert(c.schema.ignored.end(), ignore.begin(), ignore.end());
        if (bins_opt->count() != 0) {
            c.binarize.bins = bins;
        }
        if (missing_opt->count() != 0) {
            c.binarize.missing = missing;
        }
        if (keep_empty_opt->count() != 0) {
            c.binarize.keep_empty_bins = true;
        }
        if (c.dataset.empty()) {
            throw ConfigError("--dataset is required");
        }
        if (c.dataset_id.empty()) {
            c.dataset_id = fs::path(c.dataset).stem().string();
        }
        require_positive(c.binarize.bins, "bins");
    }
};

/// Search settings for the subcommands that launch optimizers.
struct SearchFlags {
    std::vector<std::string> algorithms;
    std::size_t population_size = 0;
    std::size_t generations = 0;
    std::uint64_t seed = 0;
    std::string output;
    CLI::Option* pop_opt = nullptr;
    CLI::Option* gens_opt = nullptr;
    CLI::Option* seed_opt = nullptr;

    void attach(CLI::App& app, bool many_algorithms)
    {
        auto* algo = app.add_option("--algo", algorithms, "algorithm tag: cea, nsga2, de, pso, sa");
        if (many_algorithms) {
            algo->delimiter(',');
        } else {
            algo->expected(1);
        }
        pop_opt = app.add_option("--pop", population_size, "population size");
        gens_opt = app.add_option("--gens", generations, "generations");
        seed_opt = app.add_option("--seed", seed, "seed (falls back to ARM_SEED, then 0)");
        app.add_option("--out", output, "output directory");
    }

    void apply(CliConfig& c) const
    {
        if (!algorithms.empty()) {
            c.algorithms = json::array();
            for (const auto& tag : algorithms) {
                c.algorithms.push_back(tag);
            }
        }
        if (pop_opt->count() != 0) {
            c.population_size = population_size;
        }
        if (gens_opt->count() != 0) {
            c.generations = generations;
        }
        if (seed_opt->count() != 0) {
            c.seed = seed;
        }
        if (!output.empty()) {
            c.output = output;
        }
        require_positive(c.population_size, "population size");
        require_positive(c.generations, "generations");
    }
};

std::vector<OptimizerConfig> optimizer_configs(const CliConfig& c)
{
    if (c.algorithms.empty()) {
        throw ConfigError("no algorithm given (use --algo)");
    }
    OptimizerConfig defaults;
    defaults.population_size = c.population_size;
    defaults.generations = c.generations;
    std::vector<OptimizerConfig> out;
    for (const auto& entry : c.algorithms) {
        auto config = config_from_json(entry, defaults);
        for (const auto& [name, value] : c.parameters.items()) {
            const auto tunable = tunable_parameters(config.algorithm);
            if (std::find(tunable.begin(), tunable.end(), name) != tunable.end()) {
                set_parameter(config, name, value.get<double>());
            }
        }
        out.push_back(config);
    }
    return out;
}

void print_summary(const BenchSummary& summary)
{
    std::cout << fmt::format("{:<8} {:>4} {:>16} {:>16} {:>16} {:>16} {:>16}\n", "algo", "runs", "archive", "coverage",
                             "support", "confidence", "cosine");
    auto cell = [](const MeanStd& m) { return fmt::format("{:.4f}+-{:.4f}", m.mean, m.stddev); };
    for (const auto& a : summary.algorithms) {
        std::cout << fmt::format("{:<8} {:>4} {:>16} {:>16} {:>16} {:>16} {:>16}\n", a.algorithm, a.runs,
                                 cell(a.archive_size), cell(a.coverage), cell(a.support), cell(a.confidence),
                                 cell(a.cosine));
    }
}

void write_summary_files(const BenchSummary& summary, const fs::path& dir)
{
    {
        auto out = open_output(dir / "summary.csv");
        write_summary_csv(out, summary);
    }
    auto out = open_output(dir / "ranks.csv");
    write_ranks_csv(out, summary);
}

std::size_t resolve_jobs(std::size_t jobs)
{
    if (jobs != 0) {
        return jobs;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int report_failures(std::span<const RunRecord> records)
{
    std::size_t failed = 0;
    const RunRecord* first = nullptr;
    for (const auto& r : records) {
        if (!r.error.empty()) {
            first = first ? first : &r;
            ++failed;
        }
    }
    if (failed == 0) {
        return 0;
    }
    std::cerr << fmt::format("cambrian: error: {} of {} runs failed; first: {} rep {}: {}\n", failed, records.size(),
                             first->algorithm, first->repetition, first->error);
    return 1;
}

int cmd_prepare(const CliConfig& c)
{
    if (c.output.empty()) {
        throw ConfigError("--out is required");
    }
    const auto db = load_dataset(c);
    const fs::path dir(c.output);
    fs::create_directories(dir);
    open_output(dir / "catalog.json") << catalog_to_json(db.catalog()).dump(2) << '\n';
    {
        auto out = open_output(dir / "dataset.cache");
        write_cache(out, db);
    }
    std::cout << fmt::format("{} rows, {} items -> {}\n", db.row_count(), db.item_count(), dir.string());
    return 0;
}

int cmd_run(CliConfig c)
{
    if (c.output.empty()) {
        throw ConfigError("--out is required");
    }
    if (c.algorithms.size() != 1) {
        throw ConfigError("run takes exactly one algorithm");
    }
    const auto configs = optimizer_configs(c);
    const auto db = load_dataset(c);
    ProtocolOptions options;
    options.repetitions = 1;
    options.master_seed = resolve_seed(c.seed);
    options.snapshot_generations = c.snapshots;
    options.output_dir = c.output;
    options.dataset_id = c.dataset_id;
    const auto records = run_protocol(configs, db, options);
    if (const int rc = report_failures(records); rc != 0) {
        return rc;
    }
    const auto& rec = records.front();
    const auto mean = rec.archive.mean_fitness();
    std::cout << fmt::format("{}: {} rules, coverage {:.4f}, support {:.4f}, confidence {:.4f}, cosine {:.4f}\n",
                             rec.algorithm, rec.archive.size(), rec.generations.back().coverage, mean.support,
                             mean.confidence, mean.cosine);
    return 0;
}

int cmd_bench(CliConfig c)
{
    if (c.output.empty()) {
        throw ConfigError("output directory is required (--out or \"output\")");
    }
    require_positive(c.repetitions, "repetitions");
    const auto configs = optimizer_configs(c);
    const auto db = load_dataset(c);
    ProtocolOptions options;
    options.repetitions = c.repetitions;
    options.master_seed = resolve_seed(c.seed);
    options.snapshot_generations = c.snapshots;
    options.output_dir = c.output;
    options.dataset_id = c.dataset_id;
    options.jobs = resolve_jobs(c.jobs);
    const auto records = run_protocol(configs, db, options);
    const auto summary = aggregate_and_rank(records);
    write_summary_files(summary, c.output);
    print_summary(summary);
    return report_failures(records);
}

int cmd_tune(CliConfig c)
{
    if (c.algorithms.size() != 1) {
        throw ConfigError("tune takes exactly one algorithm");
    }
    require_positive(c.iterations, "iterations");
    require_positive(c.top_k, "top-k");
    const auto base = optimizer_configs(c).front();
    const auto db = load_dataset(c);
    TuneOptions options;
    options.iterations = c.iterations;
    options.generations = c.generations;
    options.population_size = c.population_size;
    options.top_k = c.top_k;
    Random rng(resolve_seed(c.seed));
    const auto result = tune_random_search(base.algorithm, db, options, rng, base);

    json log = json::array();
    for (const auto& t : result.trials) {
        log.push_back({{"parameters", t.parameters}, {"seed", t.seed}, {"score", t.score}});
    }
    json best = json::object();
    for (const auto& name : tunable_parameters(base.algorithm)) {
        best[name] = get_parameter(result.best, name);
    }
    const json out{{"algorithm", std::string(to_string(base.algorithm))},
                   {"best", best},
                   {"best_score", result.best_score},
                   {"trials", log}};
    if (!c.output.empty()) {
        fs::create_directories(c.output);
        open_output(fs::path(c.output) / fmt::format("tune_{}.json", to_string(base.algorithm))) << out.dump(2)
                                                                                                << '\n';
    }
    std::cout << fmt::format("best score {:.6f}: {}\n", result.best_score, best.dump());
    return 0;
}

int cmd_report(const std::string& dir)
{
    const auto records = load_records(dir);
    if (records.empty()) {
        throw DatasetError("no run records found in '" + dir + "'");
    }
    const auto summary = aggregate_and_rank(records);
    write_summary_files(summary, dir);
    print_summary(summary);
    return 0;
}

} // namespace

void apply_config_file(CliConfig& c, const std::string& path)
{
    const auto j = read_json_file(path);
    if (!j.is_object()) {
        throw ConfigError("config '" + path + "' must be a JSON object");
    }
    const auto base = fs::path(path).parent_path();
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "subcommand") {
                if (!c.subcommand.empty() && value.get<std::string>() != c.subcommand) {
                    throw ConfigError("config is for '" + value.get<std::string>() + "', not '" + c.subcommand + "'");
                }
            } else if (key == "dataset") {
                c.dataset = resolve_against(base, value.get<std::string>());
            } else if (key == "dataset_id") {
                c.dataset_id = value.get<std::string>();
            } else if (key == "schema") {
                c.schema = value.is_string() ? schema_from_json(read_json_file(resolve_against(base, value)))
                                             : schema_from_json(value);
            } else if (key == "continuous" || key == "categorical") {
                const auto kind = key == "continuous" ? ColumnKind::continuous : ColumnKind::categorical;
                for (const auto& name : value.get<std::vector<std::string>>()) {
                    c.schema.kinds[name] = kind;
                }
            } else if (key == "ignore") {
                const auto names = value.get<std::vector<std::string>>();
                c.schema.ignored.insert(c.schema.ignored.end(), names.begin(), names.end());
            } else if (key == "bins") {
                c.binarize.bins = value.get<std::size_t>();
            } else if (key == "missing") {
                c.binarize.missing = value.get<std::string>();
            } else if (key == "keep_empty_bins") {
                c.binarize.keep_empty_bins = value.get<bool>();
            } else if (key == "algorithm") {
                c.algorithms = json::array({value});
            } else if (key == "algorithms") {
                c.algorithms = value.is_array() ? value : json::array({value});
            } else if (key == "parameters") {
                c.parameters = value;
            } else if (key == "population_size") {
                c.population_size = value.get<std::size_t>();
            } else if (key == "generations") {
                c.generations = value.get<std::size_t>();
            } else if (key == "repetitions") {
                c.repetitions = value.get<std::size_t>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "output") {
                c.output = resolve_against(base, value.get<std::string>());
            } else if (key == "jobs") {
                c.jobs = value.get<std::size_t>();
            } else if (key == "snapshots") {
                c.snapshots = snapshots_from_json(value);
            } else if (key == "iterations") {
                c.iterations = value.get<std::size_t>();
            } else if (key == "top_k") {
                c.top_k = value.get<std::size_t>();
            } else {
                throw ConfigError("unknown config key '" + key + "' in '" + path + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("malformed config '" + path + "': " + e.what());
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed)
{
    if (seed) {
        return *seed;
    }
    if (const char* env = std::getenv("ARM_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return value;
            }
        } catch (const std::logic_error&) {
        }
        throw ConfigError(std::string("ARM_SEED is not an unsigned integer: '") + env + "'");
    }
    return 0;
}

TransactionDB load_dataset(const CliConfig& c)
{
    std::ifstream in(c.dataset, std::ios::binary);
    if (!in) {
        throw DatasetError("cannot open '" + c.dataset + "'");
    }
    char magic[8] = {};
    in.read(magic, sizeof magic);
    in.clear();
    in.seekg(0);
    if (std::string_view(magic, sizeof magic) == "CAMBRDB1") {
        return read_cache(in);
    }
    try {
        return load_and_binarize(in, c.schema, c.binarize);
    } catch (const ParseError& e) {
        throw ParseError(e.row(), c.dataset + ": " + e.detail());
    }
}

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Multi-objective association rule mining"};
    app.require_subcommand(1);

    CliConfig config;

    auto* prepare = app.add_subcommand("prepare", "binarize a CSV into catalog.json and dataset.cache");
    DatasetFlags prepare_data;
    prepare_data.attach(*prepare);
    std::string prepare_out;
    prepare->add_option("--out", prepare_out, "output directory");

    auto* run = app.add_subcommand("run", "run one algorithm once");
    DatasetFlags run_data;
    SearchFlags run_search;
    run_data.attach(*run);
    run_search.attach(*run, false);
    run->add_flag("--snapshots", "dump evaluated individuals at generations 0, 1, 10, 20, 30, 40, 49");

    auto* bench = app.add_subcommand("bench", "repeated runs of several algorithms plus summary tables");
    DatasetFlags bench_data;
    SearchFlags bench_search;
    bench_data.attach(*bench);
    bench_search.attach(*bench, true);
    std::size_t reps = 0;
    std::size_t jobs = 0;
    auto* reps_opt = bench->add_option("--reps", reps, "repetitions per algorithm");
    auto* jobs_opt = bench->add_option("--jobs", jobs, "worker threads (default: available cores)");
    bench->add_flag("--snapshots", "dump evaluated individuals at generations 0, 1, 10, 20, 30, 40, 49");

    auto* tune = app.add_subcommand("tune", "random search over an algorithm's hyperparameters");
    DatasetFlags tune_data;
    SearchFlags tune_search;
    tune_data.attach(*tune);
    tune_search.attach(*tune, false);
    std::size_t iterations = 0;
    std::size_t top_k = 0;
    auto* iter_opt = tune->add_option("--iterations", iterations, "sampled hyperparameter sets");
    auto* topk_opt = tune->add_option("--top-k", top_k, "archive entries summed into the score");

    auto* report = app.add_subcommand("report", "summary and rank tables for a results directory");
    std::string report_dir;
    report->add_option("dir", report_dir, "results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (prepare->parsed()) {
            config.subcommand = "prepare";
            prepare_data.apply(config);
            if (!prepare_out.empty()) {
                config.output = prepare_out;
            }
            return cmd_prepare(config);
        }
        if (run->parsed()) {
            config.subcommand = "run";
            run_data.apply(config);
            run_search.apply(config);
            if (run->count("--snapshots") != 0) {
                config.snapshots = default_snapshot_generations();
            }
            return cmd_run(config);
        }
        if (bench->parsed()) {
            config.subcommand = "bench";
            bench_data.apply(config);
            bench_search.apply(config);
            if (reps_opt->count() != 0) {
                config.repetitions = reps;
            }
            if (jobs_opt->count() != 0) {
                require_positive(jobs, "jobs");
                config.jobs = jobs;
            }
            if (bench->count("--snapshots") != 0) {
                config.snapshots = default_snapshot_generations();
            }
            return cmd_bench(config);
        }
        if (tune->parsed()) {
            config.subcommand = "tune";
            config.generations = 20;
            tune_data.apply(config);
            tune_search.apply(config);
            if (iter_opt->count() != 0) {
                config.iterations = iterations;
            }
            if (topk_opt->count() != 0) {
                config.top_k = top_k;
            }
            return cmd_tune(config);
        }
        return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        std::cerr << "cambrian: error: " << message << '\n';
        return 1;
    }
}

} // namespace cambrian::cli
