#include "cambrian/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cambrian/csv.hpp"
#include "cambrian/error.hpp"

namespace cambrian {

namespace fs = std::filesystem;

namespace {

struct Job {
    OptimizerConfig config;
    std::size_t repetition;
};

struct JobOutput {
    RunRecord record;
    std::map<std::size_t, std::string> snapshots; // generation -> CSV body
};

std::string snapshot_header(std::size_t n_items)
{
    std::string header;
    for (std::size_t i = 0; i < n_items; ++i) {
        header += fmt::format("item_{},", i);
    }
    header += "support,confidence,cosine\n";
    return header;
}

void append_snapshot_row(std::string& body, const Individual& ind)
{
    const auto n = ind.item_count();
    for (std::size_t i = 0; i < n; ++i) {
        body += is_present(ind.genome, i) ? "1," : "0,";
    }
    const auto& f = *ind.fitness;
    body += fmt::format("{:.6f},{:.6f},{:.6f}\n", f.support, f.confidence, f.cosine);
}

std::string format_fixed(double v)
{
    return fmt::format("{:.6f}", v);
}

// Front files follow the same six-decimal convention as the CSVs.
void round_floats(nlohmann::json& j)
{
    if (j.is_number_float()) {
        j = std::stod(format_fixed(j.get<double>()));
    } else if (j.is_structured()) {
        for (auto& child : j) {
            round_floats(child);
        }
    }
}

JobOutput execute(const Job& job, const TransactionDB& db, const ProtocolOptions& options)
{
    JobOutput out;
    auto& rec = out.record;
    rec.algorithm = std::string(to_string(job.config.algorithm));
    rec.dataset = options.dataset_id;
    rec.repetition = job.repetition;
    rec.seed = job.config.seed;
    try {
        EvaluationObserver observer;
        if (!options.snapshot_generations.empty()) {
            observer = [&](std::size_t generation, const Individual& ind) {
                if (options.snapshot_generations.count(generation) != 0) {
                    append_snapshot_row(out.snapshots[generation], ind);
                }
            };
        }
        auto result = run(job.config, db, observer);
        rec.generations = std::move(result.stats);
        rec.archive = std::move(result.archive);
    } catch (const std::exception& e) {
        rec.error = e.what();
        out.snapshots.clear();
    }
    return out;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

void persist(const JobOutput& output, const OptimizerConfig& config, const TransactionDB& db, const fs::path& dir)
{
    const auto& rec = output.record;
    const auto stem = fmt::format("{}_{}", rec.algorithm, rec.repetition);
    if (!rec.error.empty()) {
        open_output(dir / fmt::format("error_{}.txt", stem)) << rec.error << '\n';
        return;
    }
    {
        auto out = open_output(dir / fmt::format("metrics_{}.csv", stem));
        write_metrics_csv(out, rec.generations);
    }
    {
        auto out = open_output(dir / fmt::format("timing_{}.csv", stem));
        write_timing_csv(out, rec.generations);
    }
    auto front = archive_to_json(rec.archive, &db.catalog());
    round_floats(front);
    open_output(dir / fmt::format("front_{}.json", stem)) << front.dump(2) << '\n';
    open_output(dir / fmt::format("config_{}.json", stem)) << config_to_json(config).dump(2) << '\n';
    if (!output.snapshots.empty()) {
        fs::create_directories(dir / "snapshots");
        const auto header = snapshot_header(db.item_count());
        for (const auto& [generation, body] : output.snapshots) {
            open_output(dir / "snapshots" / fmt::format("{}_g{}.csv", stem, generation)) << header << body;
        }
    }
}

} // namespace

std::set<std::size_t> default_snapshot_generations()
{
    return {0, 1, 10, 20, 30, 40, 49};
}

std::vector<RunRecord> run_protocol(std::span<const OptimizerConfig> algorithms, const TransactionDB& db,
                                    const ProtocolOptions& options)
{
    std::vector<Job> jobs;
    for (const auto& config : algorithms) {
        for (std::size_t r = 0; r < options.repetitions; ++r) {
            Job job{config, r};
            job.config.seed = options.master_seed + r;
            jobs.push_back(job);
        }
    }

    std::vector<JobOutput> outputs(jobs.size());
    const auto workers = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            outputs[i] = execute(jobs[i], db, options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next++; i < jobs.size(); i = next++) {
                    outputs[i] = execute(jobs[i], db, options);
                }
            });
        }
    }

    if (!options.output_dir.empty()) {
        fs::create_directories(options.output_dir);
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            persist(outputs[i], jobs[i].config, db, options.output_dir);
        }
    }

    std::vector<RunRecord> records;
    records.reserve(outputs.size());
    for (auto& o : outputs) {
        records.push_back(std::move(o.record));
    }
    return records;
}

void write_metrics_csv(std::ostream& out, std::span<const GenerationStats> stats)
{
    out << "generation,archive_size,coverage,mean_support,mean_confidence,mean_cosine,candidates_evaluated\n";
    for (const auto& s : stats) {
        out << fmt::format("{},{},{},{},{},{},{}\n", s.generation, s.archive_size, format_fixed(s.coverage),
                           format_fixed(s.mean.support), format_fixed(s.mean.confidence), format_fixed(s.mean.cosine),
                           s.candidates_evaluated);
    }
}

void write_timing_csv(std::ostream& out, std::span<const GenerationStats> stats)
{
    out << "generation,elapsed_ms\n";
    for (const auto& s : stats) {
        out << fmt::format("{},{}\n", s.generation, format_fixed(s.elapsed_ms));
    }
}

std::vector<GenerationStats> read_metrics_csv(std::istream& in)
{
    auto records = csv::read(in);
    if (records.empty()) {
        throw ParseError(1, "missing metrics header");
    }
    std::vector<GenerationStats> stats;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& f = records[r].fields;
        if (f.size() != 7) {
            throw ParseError(records[r].line, "expected 7 metric fields");
        }
        try {
            GenerationStats s;
            s.generation = std::stoul(f[0]);
            s.archive_size = std::stoul(f[1]);
            s.coverage = std::stod(f[2]);
            s.mean = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
            s.candidates_evaluated = std::stoul(f[6]);
            stats.push_back(s);
        } catch (const std::logic_error&) {
            throw ParseError(records[r].line, "malformed metric value");
        }
    }
    return stats;
}

MeanStd mean_std(std::span<const double> values)
{
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (auto v : values) {
        sum += v;
    }
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (auto v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

BenchSummary aggregate_and_rank(std::span<const RunRecord> records)
{
    BenchSummary summary;
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunRecord*>> by_algorithm;
    for (const auto& rec : records) {
        if (!rec.error.empty() || rec.generations.empty()) {
            continue;
        }
        if (by_algorithm.find(rec.algorithm) == by_algorithm.end()) {
            order.push_back(rec.algorithm);
        }
        by_algorithm[rec.algorithm].push_back(&rec);
    }

    for (const auto& name : order) {
        const auto& recs = by_algorithm[name];
        std::vector<double> size, cov, supp, conf, cos;
        for (const auto* rec : recs) {
            const auto& last = rec->generations.back();
            size.push_back(static_cast<double>(last.archive_size));
            cov.push_back(last.coverage);
            supp.push_back(last.mean.support);
            conf.push_back(last.mean.confidence);
            cos.push_back(last.mean.cosine);
        }
        summary.algorithms.push_back(
            {name, recs.size(), mean_std(size), mean_std(cov), mean_std(supp), mean_std(conf), mean_std(cos)});
    }

    std::map<std::size_t, std::vector<const RunRecord*>> by_repetition;
    for (const auto& name : order) {
        for (const auto* rec : by_algorithm[name]) {
            by_repetition[rec->repetition].push_back(rec);
        }
    }
    for (const auto& name : order) {
        for (auto metric : rank_metrics) {
            summary.histogram[name][std::string(metric)].assign(order.size(), 0);
        }
    }
    auto metric_value = [](const RunRecord& rec, std::string_view metric) {
        const auto& m = rec.generations.back().mean;
        return metric == "support" ? m.support : metric == "confidence" ? m.confidence : m.cosine;
    };
    for (const auto& [repetition, recs] : by_repetition) {
        for (auto metric : rank_metrics) {
            for (const auto* rec : recs) {
                const double v = metric_value(*rec, metric);
                std::size_t rank = 1;
                for (const auto* other : recs) {
                    if (metric_value(*other, metric) > v) {
                        ++rank;
                    }
                }
                summary.ranks.push_back({repetition, rec->algorithm, std::string(metric), rank});
                ++summary.histogram[rec->algorithm][std::string(metric)][rank - 1];
            }
        }
    }
    return summary;
}

void write_summary_csv(std::ostream& out, const BenchSummary& summary)
{
    out << "algorithm,runs,archive_size_mean,archive_size_std,coverage_mean,coverage_std,support_mean,support_std,"
           "confidence_mean,confidence_std,cosine_mean,cosine_std\n";
    for (const auto& a : summary.algorithms) {
        out << fmt::format("{},{}", a.algorithm, a.runs);
        for (const auto* m : {&a.archive_size, &a.coverage, &a.support, &a.confidence, &a.cosine}) {
            out << ',' << format_fixed(m->mean) << ',' << format_fixed(m->stddev);
        }
        out << '\n';
    }
}

void write_ranks_csv(std::ostream& out, const BenchSummary& summary)
{
    out << "algorithm,metric,rank,count\n";
    for (const auto& a : summary.algorithms) {
        const auto& per_metric = summary.histogram.at(a.algorithm);
        for (auto metric : rank_metrics) {
            const auto& counts = per_metric.at(std::string(metric));
            for (std::size_t r = 0; r < counts.size(); ++r) {
                out << fmt::format("{},{},{},{}\n", a.algorithm, metric, r + 1, counts[r]);
            }
        }
    }
}

std::vector<RunRecord> load_records(const fs::path& dir)
{
    std::vector<RunRecord> records;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("'" + dir.string() + "' is not a directory");
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || !name.starts_with("metrics_") || !name.ends_with(".csv")) {
            continue;
        }
        const auto stem = name.substr(8, name.size() - 12);
        const auto sep = stem.rfind('_');
        if (sep == std::string::npos) {
            continue;
        }
        RunRecord rec;
        rec.algorithm = stem.substr(0, sep);
        try {
            rec.repetition = std::stoul(stem.substr(sep + 1));
        } catch (const std::logic_error&) {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        try {
            rec.generations = read_metrics_csv(in);
        } catch (const ParseError& e) {
            throw ParseError(e.row(), entry.path().string() + ": " + e.detail());
        }
        records.push_back(std::move(rec));
    }
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.algorithm, a.repetition) < std::tie(b.algorithm, b.repetition);
    });
    return records;
}

double top_k_score(const ParetoArchive& archive, std::size_t k)
{
    std::vector<double> sums;
    for (const auto& e : archive.entries()) {
        sums.push_back(e.fitness.sum());
    }
    std::sort(sums.begin(), sums.end(), std::greater<>());
    double score = 0.0;
    for (std::size_t i = 0; i < std::min(k, sums.size()); ++i) {
        score += sums[i];
    }
    return score;
}

TuneResult tune_random_search(Algorithm algorithm, const TransactionDB& db, const TuneOptions& options, Random& rng,
                              const OptimizerConfig& base)
{
    const auto names = tunable_parameters(algorithm);
    if (names.empty()) {
        throw ConfigError(std::string(to_string(algorithm)) + " has no tunable [0, 1] hyperparameters");
    }
    if (options.iterations == 0) {
        throw ConfigError("tune: iterations must be positive");
    }
    TuneResult result;
    for (std::size_t it = 0; it < options.iterations; ++it) {
        OptimizerConfig config = base;
        config.algorithm = algorithm;
        config.population_size = options.population_size;
        config.generations = options.generations;
        TuneTrial trial;
        for (const auto& name : names) {
            const double value = rng.uniform();
            set_parameter(config, name, value);
            trial.parameters[name] = value;
        }
        trial.seed = rng.engine()();
        config.seed = trial.seed;
        trial.score = top_k_score(run(config, db).archive, options.top_k);
        if (result.trials.empty() || trial.score > result.best_score) {
            result.best = config;
            result.best_score = trial.score;
        }
        result.trials.push_back(std::move(trial));
    }
    return result;
}

} // namespace cambrian
