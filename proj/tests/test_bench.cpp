#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cambrian/bench.hpp"
#include "cambrian/error.hpp"
#include "support.hpp"

using namespace cambrian;
namespace fs = std::filesystem;

namespace {

const TransactionDB& iris()
{
    static const auto db = load_and_binarize_file(testing::iris_path(), {});
    return db;
}

OptimizerConfig config_for(Algorithm algo, std::size_t pop, std::size_t gens)
{
    OptimizerConfig c;
    c.algorithm = algo;
    c.population_size = pop;
    c.generations = gens;
    return c;
}

RunRecord record(const std::string& algo, std::size_t rep, double size, double cov, FitnessVector mean)
{
    RunRecord r;
    r.algorithm = algo;
    r.repetition = rep;
    GenerationStats s;
    s.generation = 1;
    s.archive_size = static_cast<std::size_t>(size);
    s.coverage = cov;
    s.mean = mean;
    r.generations.push_back(s);
    return r;
}

std::size_t histogram_total(const BenchSummary& s, const std::string& algo, const std::string& metric)
{
    const auto& h = s.histogram.at(algo).at(metric);
    return std::accumulate(h.begin(), h.end(), std::size_t{0});
}

} // namespace

TEST_CASE("coverage examples")
{
    const auto db = testing::db_from_rows(4, {{0, 1}, {0, 1, 3}, {0}, {1}, {0, 1, 2, 3}});
    ParetoArchive archive;
    CHECK(coverage(archive, db) == 0.0);
    archive.offer(Rule{{0}, {1}}, {0.5, 1.0, 0.8});
    CHECK(coverage(archive, db) == 0.5);

    ParetoArchive disjoint;
    disjoint.offer(Rule{{2}, {4}}, {0.25, 1.0, 0.5});
    disjoint.offer(Rule{{3}, {4}}, {0.25, 1.0, 0.5});
    CHECK(coverage(disjoint, db) == 0.5);
}

TEST_CASE("coverage matches a row scan and grows with the archive")
{
    Random rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = testing::random_matrix(rng, 40, 6, 0.6);
        const auto db = testing::db_from_matrix(m, 6);
        ParetoArchive archive;
        std::vector<Rule> rules;
        double last = 0.0;
        for (int k = 0; k < 15; ++k) {
            const auto rule = testing::random_rule(rng, 6);
            // distinct fitness keeps every offered rule, so the archive only grows
            if (archive.offer(rule, {0.01 * k, 1.0 - 0.01 * k, 0.5})) {
                rules.push_back(rule);
            }
            std::size_t covered = 0;
            for (const auto& row : m) {
                bool hit = false;
                for (const auto& r : rules) {
                    hit = hit || testing::row_has(row, r.items());
                }
                covered += hit;
            }
            const double c = coverage(archive, db);
            CHECK(c == doctest::Approx(covered / 40.0));
            CHECK(c >= last);
            last = c;
        }
    }
}

TEST_CASE("protocol produces one record per repetition")
{
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 20, 5), config_for(Algorithm::sa, 10, 5)};
    ProtocolOptions opts;
    opts.repetitions = 3;
    opts.master_seed = 100;
    const auto records = run_protocol(configs, iris(), opts);
    REQUIRE(records.size() == 6);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].algorithm == (i < 3 ? "cea" : "sa"));
        CHECK(records[i].repetition == i % 3);
        CHECK(records[i].seed == 100 + i % 3);
        CHECK(records[i].generations.size() == 5);
        CHECK(records[i].error.empty());
        seeds.insert(records[i].seed);
        for (const auto& s : records[i].generations) {
            for (double v : {s.coverage, s.mean.support, s.mean.confidence, s.mean.cosine}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
    CHECK(seeds.size() == 3);
}

TEST_CASE("minimal protocol writes no snapshots")
{
    testing::TempDir dir("minimal");
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 10, 3)};
    ProtocolOptions opts;
    opts.repetitions = 1;
    opts.output_dir = dir.path();
    const auto records = run_protocol(configs, iris(), opts);
    CHECK(records.size() == 1);
    CHECK(fs::exists(dir.path() / "metrics_cea_0.csv"));
    CHECK(fs::exists(dir.path() / "front_cea_0.json"));
    CHECK(fs::exists(dir.path() / "timing_cea_0.csv"));
    CHECK(fs::exists(dir.path() / "config_cea_0.json"));
    CHECK_FALSE(fs::exists(dir.path() / "snapshots"));

    std::ifstream in(dir.path() / "metrics_cea_0.csv");
    const auto back = read_metrics_csv(in);
    REQUIRE(back.size() == 3);
    CHECK(back[2].archive_size == records[0].generations[2].archive_size);
    CHECK(back[2].coverage == doctest::Approx(records[0].generations[2].coverage).epsilon(1e-6));

    const auto front = nlohmann::json::parse(testing::slurp(dir.path() / "front_cea_0.json"));
    CHECK(front.size() == records[0].archive.size());
}

TEST_CASE("snapshots dump every evaluated individual")
{
    testing::TempDir dir("snap");
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 20, 3)};
    ProtocolOptions opts;
    opts.repetitions = 1;
    opts.output_dir = dir.path();
    opts.snapshot_generations = {0, 2};
    const auto records = run_protocol(configs, iris(), opts);
    const auto g0 = testing::slurp(dir.path() / "snapshots" / "cea_0_g0.csv");
    const auto g2 = testing::slurp(dir.path() / "snapshots" / "cea_0_g2.csv");
    CHECK_FALSE(fs::exists(dir.path() / "snapshots" / "cea_0_g1.csv"));
    CHECK(std::count(g0.begin(), g0.end(), '\n') == 21); // header + initial population
    const auto header = g0.substr(0, g0.find('\n'));
    CHECK(header.rfind("item_0,item_1,", 0) == 0);
    CHECK(header.find("item_41,support,confidence,cosine") != std::string::npos);
    // generation 2: candidates plus random replacements
    CHECK(std::count(g2.begin(), g2.end(), '\n') >= 21);
}

TEST_CASE("metric files are byte identical across reruns and worker counts")
{
    testing::TempDir one("j1"), two("j2"), again("j1b");
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 20, 4), config_for(Algorithm::de, 20, 4),
                                               config_for(Algorithm::pso, 20, 4)};
    ProtocolOptions opts;
    opts.repetitions = 3;
    opts.master_seed = 9;
    opts.snapshot_generations = {1};
    opts.output_dir = one.path();
    run_protocol(configs, iris(), opts);
    opts.output_dir = again.path();
    run_protocol(configs, iris(), opts);
    opts.output_dir = two.path();
    opts.jobs = 4;
    run_protocol(configs, iris(), opts);

    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(one.path())) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || name.rfind("timing_", 0) == 0) {
            continue;
        }
        const auto rel = fs::relative(entry.path(), one.path());
        CHECK(testing::slurp(entry.path()) == testing::slurp(two.path() / rel));
        CHECK(testing::slurp(entry.path()) == testing::slurp(again.path() / rel));
        ++compared;
    }
    CHECK(compared == 9 * 3 + 9);
}

TEST_CASE("a failing run spoils only its own record")
{
    testing::TempDir dir("fail");
    // CEA needs at least two individuals
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 1, 3), config_for(Algorithm::de, 10, 3)};
    ProtocolOptions opts;
    opts.repetitions = 1;
    opts.output_dir = dir.path();
    const auto records = run_protocol(configs, iris(), opts);
    REQUIRE(records.size() == 2);
    CHECK_FALSE(records[0].error.empty());
    CHECK(records[1].error.empty());
    CHECK(fs::exists(dir.path() / "error_cea_0.txt"));
    CHECK(fs::exists(dir.path() / "metrics_de_0.csv"));
}

TEST_CASE("output errors name the path")
{
    testing::TempDir dir("io");
    const auto blocker = dir.path() / "blocker";
    std::ofstream(blocker) << "x";
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::sa, 5, 2)};
    ProtocolOptions opts;
    opts.repetitions = 1;
    opts.output_dir = blocker / "sub";
    try {
        run_protocol(configs, iris(), opts);
        FAIL("wrote below a regular file");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
}

TEST_CASE("summary statistics match a hand computation")
{
    std::vector<RunRecord> records{record("x", 0, 2, 0.30, {0.1, 0.9, 0.8}), record("x", 1, 3, 0.32, {0.2, 1.0, 0.7}),
                                   record("x", 2, 7, 0.25, {0.6, 0.8, 0.9})};
    const auto s = aggregate_and_rank(records);
    REQUIRE(s.algorithms.size() == 1);
    const auto& a = s.algorithms[0];
    CHECK(a.runs == 3);
    // mean 4, deviations -2,-1,3 -> sample variance 14/2
    CHECK(a.archive_size.mean == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(a.archive_size.stddev == doctest::Approx(std::sqrt(7.0)).epsilon(1e-12));
    CHECK(a.support.mean == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(a.support.stddev - std::sqrt(0.07)) < 1e-9);
    CHECK(std::abs(a.coverage.mean - 0.29) < 1e-9);
    CHECK(std::abs(a.coverage.stddev - std::sqrt(0.0013)) < 1e-9);
    CHECK(std::abs(a.confidence.stddev - 0.1) < 1e-9);
    CHECK(std::abs(a.cosine.mean - 0.8) < 1e-9);

    // single algorithm: everything ranks first
    for (const auto& r : s.ranks) {
        CHECK(r.rank == 1);
    }
    CHECK(s.histogram.at("x").at("support") == std::vector<std::size_t>{3});

    const double one[] = {5.0};
    CHECK(mean_std(one).stddev == 0.0);
    CHECK(mean_std(std::span<const double>{}).mean == 0.0);
}

TEST_CASE("ranks under a total order are point masses")
{
    std::vector<RunRecord> records;
    for (std::size_t rep = 0; rep < 5; ++rep) {
        const double jitter = 0.01 * static_cast<double>(rep);
        records.push_back(record("hi", rep, 2, 0.3, {0.5 + jitter, 0.9, 0.9}));
        records.push_back(record("lo", rep, 2, 0.3, {0.2 + jitter, 0.8, 0.9}));
    }
    const auto s = aggregate_and_rank(records);
    CHECK(s.histogram.at("hi").at("support") == std::vector<std::size_t>{5, 0});
    CHECK(s.histogram.at("lo").at("support") == std::vector<std::size_t>{0, 5});
    CHECK(s.histogram.at("hi").at("confidence") == std::vector<std::size_t>{5, 0});
    // tied cosine: both share rank 1
    CHECK(s.histogram.at("lo").at("cosine") == std::vector<std::size_t>{5, 0});
    for (const auto& algo : {"hi", "lo"}) {
        for (auto metric : rank_metrics) {
            CHECK(histogram_total(s, algo, std::string(metric)) == 5);
        }
    }

    std::ostringstream ranks;
    write_ranks_csv(ranks, s);
    CHECK(ranks.str().rfind("algorithm,metric,rank,count\nhi,support,1,5\nhi,support,2,0\n", 0) == 0);
    std::ostringstream summary;
    write_summary_csv(summary, s);
    CHECK(summary.str().find("hi,5,2.000000,0.000000,0.300000,") != std::string::npos);
}

TEST_CASE("records reload from a results directory")
{
    testing::TempDir dir("reload");
    const std::vector<OptimizerConfig> configs{config_for(Algorithm::cea, 10, 3), config_for(Algorithm::nsga2, 10, 3)};
    ProtocolOptions opts;
    opts.repetitions = 2;
    opts.output_dir = dir.path();
    const auto records = run_protocol(configs, iris(), opts);
    const auto loaded = load_records(dir.path());
    REQUIRE(loaded.size() == 4);
    CHECK(loaded[0].algorithm == "cea");
    CHECK(loaded[3].algorithm == "nsga2");
    CHECK(loaded[3].repetition == 1);
    const auto direct = aggregate_and_rank(records);
    const auto replay = aggregate_and_rank(loaded);
    std::ostringstream a, b;
    write_ranks_csv(a, direct);
    write_ranks_csv(b, replay);
    CHECK(a.str() == b.str());

    testing::TempDir empty("empty");
    CHECK(load_records(empty.path()).empty());
    CHECK_THROWS(load_records(empty.path() / "missing"));

    std::istringstream bad("generation,archive_size,coverage,mean_support,mean_confidence,mean_cosine,candidates_evaluated\n1,2,x,0,0,0,0\n");
    CHECK_THROWS_AS(read_metrics_csv(bad), ParseError);
}

TEST_CASE("tuning score")
{
    ParetoArchive perfect;
    for (ItemIndex i = 0; i < 10; ++i) {
        perfect.offer(Rule{{i}, {static_cast<ItemIndex>(i + 1)}}, {1, 1, 1});
    }
    CHECK(top_k_score(perfect) == 30.0);

    ParetoArchive few;
    few.offer(Rule{{0}, {1}}, {0.9, 0.1, 0.2});
    few.offer(Rule{{1}, {0}}, {0.1, 0.9, 0.3});
    CHECK(top_k_score(few) == doctest::Approx(2.5));
    CHECK(top_k_score(few, 1) == doctest::Approx(1.3));
    CHECK(top_k_score(ParetoArchive{}) == 0.0);
}

TEST_CASE("random search returns the best logged trial")
{
    const auto db = testing::db_from_rows(12, {{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 6}, {6, 7, 8}, {0, 8, 9}, {1, 2, 10}});
    TuneOptions opts;
    opts.iterations = 5;
    opts.generations = 3;
    opts.population_size = 10;
    Random rng(3);
    const auto result = tune_random_search(Algorithm::pso, db, opts, rng);
    REQUIRE(result.trials.size() == 5);
    double best = -1.0;
    for (const auto& t : result.trials) {
        CHECK(t.parameters.size() == 3);
        for (const auto& [name, value] : t.parameters) {
            CHECK(value >= 0.0);
            CHECK(value < 1.0);
        }
        best = std::max(best, t.score);
        // replay the logged trial
        OptimizerConfig c;
        c.algorithm = Algorithm::pso;
        c.population_size = 10;
        c.generations = 3;
        c.seed = t.seed;
        for (const auto& [name, value] : t.parameters) {
            set_parameter(c, name, value);
        }
        CHECK(top_k_score(run(c, db).archive) == t.score);
    }
    CHECK(result.best_score == best);

    opts.iterations = 1;
    Random again(8);
    const auto single = tune_random_search(Algorithm::sa, db, opts, again);
    REQUIRE(single.trials.size() == 1);
    CHECK(single.best.sa.alpha == single.trials[0].parameters.at("alpha"));
    CHECK(single.best_score == single.trials[0].score);

    CHECK_THROWS_AS(tune_random_search(Algorithm::cea, db, opts, again), ConfigError);
}

TEST_CASE("default snapshot generations")
{
    CHECK(default_snapshot_generations() == std::set<std::size_t>{0, 1, 10, 20, 30, 40, 49});
}
