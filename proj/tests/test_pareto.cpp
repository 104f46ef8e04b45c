#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "cambrian/error.hpp"
#include "cambrian/measures.hpp"
#include "cambrian/pareto.hpp"
#include "support.hpp"

using namespace cambrian;

namespace {

Individual with_fitness(const FitnessVector& f)
{
    Individual ind(Genome::Zero(4));
    ind.fitness = f;
    return ind;
}

std::vector<Individual> evaluated_population(Random& rng, const TransactionDB& db, std::size_t size)
{
    std::vector<Individual> pop;
    for (std::size_t i = 0; i < size; ++i) {
        Individual ind(encode(testing::random_rule(rng, db.item_count()), db.item_count(), rng));
        evaluate(ind, db);
        pop.push_back(std::move(ind));
    }
    return pop;
}

std::set<Rule> archive_rules(const ParetoArchive& archive)
{
    std::set<Rule> out;
    for (const auto& e : archive.entries()) {
        out.insert(e.rule);
    }
    return out;
}

} // namespace

TEST_CASE("domination examples")
{
    CHECK(dominates({0.5, 0.9, 0.8}, {0.4, 0.9, 0.7}));
    CHECK_FALSE(dominates({0.5, 0.9, 0.8}, {0.5, 0.9, 0.8}));
    CHECK_FALSE(dominates({0.6, 0.5, 0.5}, {0.5, 0.6, 0.5}));
    CHECK_FALSE(dominates({0.5, 0.6, 0.5}, {0.6, 0.5, 0.5}));
}

TEST_CASE("filter examples")
{
    const std::vector<FitnessVector> two{{1, 1, 1}, {0.5, 0.5, 0.5}};
    CHECK(non_dominated_filter(two) == std::vector<std::size_t>{0});
    CHECK(non_dominated_filter(std::span<const FitnessVector>{}).empty());
    const std::vector<FitnessVector> same{{0.2, 0.3, 0.4}, {0.2, 0.3, 0.4}};
    CHECK(non_dominated_filter(same) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("filter matches the pairwise oracle")
{
    Random rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = rng.between(0, 200);
        std::vector<FitnessVector> pts;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back(trial % 2 ? testing::random_point(rng) : FitnessVector{rng.uniform(), rng.uniform(), rng.uniform()});
        }
        CHECK(non_dominated_filter(pts) == testing::oracle_front(pts));

        std::vector<Individual> pop;
        for (const auto& p : pts) {
            pop.push_back(with_fitness(p));
        }
        CHECK(non_dominated_filter(std::span<const Individual>(pop)) == testing::oracle_front(pts));
    }
}

TEST_CASE("merging into an empty archive keeps the non-dominated rules")
{
    Random rng(4);
    const auto m = testing::random_matrix(rng, 30, 6, 0.5);
    const auto db = testing::db_from_matrix(m, 6);
    const auto pop = evaluated_population(rng, db, 60);
    const auto archive = merge(ParetoArchive{}, pop);

    std::vector<FitnessVector> pts;
    for (const auto& ind : pop) {
        pts.push_back(*ind.fitness);
    }
    std::set<Rule> expect;
    for (auto i : testing::oracle_front(pts)) {
        expect.insert(*decode(pop[i]));
    }
    CHECK(archive_rules(archive) == expect);
    CHECK(archive.size() == expect.size()); // unique by rule
}

TEST_CASE("dominated newcomers leave the archive unchanged")
{
    ParetoArchive archive;
    CHECK(archive.offer(Rule{{0}, {1}}, {0.9, 0.9, 0.9}));
    CHECK_FALSE(archive.offer(Rule{{1}, {0}}, {0.5, 0.9, 0.9}));
    CHECK_FALSE(archive.offer(Rule{{0}, {1}}, {0.9, 0.9, 0.9})); // duplicate rule
    CHECK(archive.size() == 1);
    CHECK(archive.offer(Rule{{0}, {2}}, {1.0, 0.9, 0.9}));
    CHECK(archive.size() == 1);
    CHECK(archive.contains(Rule{{0}, {2}}));
    CHECK_FALSE(archive.contains(Rule{{0}, {1}}));
    // equal fitness under a different rule is kept
    CHECK(archive.offer(Rule{{1}, {2}}, {1.0, 0.9, 0.9}));
    CHECK(archive.size() == 2);
}

TEST_CASE("archive after random merges equals the front of the union")
{
    Random rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = testing::random_matrix(rng, 20, 7, 0.55);
        const auto db = testing::db_from_matrix(m, 7);
        ParetoArchive archive;
        std::map<Rule, FitnessVector> seen;
        for (int step = 0; step < 10; ++step) {
            const auto pop = evaluated_population(rng, db, rng.between(1, 50));
            archive.merge(pop);
            for (const auto& ind : pop) {
                seen[*decode(ind)] = *ind.fitness;
            }
        }
        std::set<Rule> expect;
        for (const auto& [rule, f] : seen) {
            bool dominated = false;
            for (const auto& [other, g] : seen) {
                dominated = dominated || testing::oracle_dominates(g, f);
            }
            if (!dominated) {
                expect.insert(rule);
            }
        }
        CHECK(archive_rules(archive) == expect);
    }
}

TEST_CASE("archive merge skips invalid rules and rejects unevaluated ones")
{
    ParetoArchive archive;
    std::vector<Individual> pop{with_fitness({0, 0, 0})}; // zero genome decodes as invalid
    archive.merge(pop);
    CHECK(archive.empty());

    Random rng(1);
    std::vector<Individual> raw{random_individual(4, rng)};
    CHECK_THROWS_AS(archive.merge(raw), ContractError);
}

TEST_CASE("bounded archive rejects newcomers that displace nobody")
{
    ParetoArchive archive(2);
    CHECK(archive.offer(Rule{{0}, {1}}, {0.9, 0.1, 0.5}));
    CHECK(archive.offer(Rule{{1}, {0}}, {0.1, 0.9, 0.5}));
    CHECK_FALSE(archive.offer(Rule{{0}, {2}}, {0.5, 0.5, 0.5}));
    CHECK(archive.offer(Rule{{2}, {0}}, {0.95, 0.1, 0.5}));
    CHECK(archive.size() == 2);
}

TEST_CASE("mean fitness and export")
{
    ParetoArchive archive;
    CHECK(archive.mean_fitness() == FitnessVector{0, 0, 0});
    archive.offer(Rule{{0}, {1}}, {0.2, 1.0, 0.5});
    archive.offer(Rule{{1}, {0}}, {0.4, 0.5, 0.7});
    const auto mean = archive.mean_fitness();
    CHECK(mean.support == doctest::Approx(0.3));
    CHECK(mean.confidence == doctest::Approx(0.75));
    CHECK(mean.cosine == doctest::Approx(0.6));
    const auto j = archive_to_json(archive);
    REQUIRE(j.size() == 2);
    CHECK(rule_from_json(j[1]) == Rule{{1}, {0}});
}

TEST_CASE("relation sets")
{
    std::vector<Individual> same(4, with_fitness({0.3, 0.3, 0.3}));
    for (std::size_t t = 0; t < same.size(); ++t) {
        const auto r = find_relations(same, t);
        CHECK(r.dominating.empty());
        CHECK(r.dominated.empty());
    }

    std::vector<Individual> chain{with_fitness({0.9, 0.9, 0.9}), with_fitness({0.5, 0.5, 0.5}),
                                  with_fitness({0.1, 0.1, 0.1})};
    const auto r = find_relations(chain, 1);
    CHECK(r.dominating == std::vector<std::size_t>{0});
    CHECK(r.dominated == std::vector<std::size_t>{2});

    Random rng(9);
    std::vector<Individual> pop;
    std::vector<FitnessVector> pts;
    for (int i = 0; i < 100; ++i) {
        pts.push_back(testing::random_point(rng, 5));
        pop.push_back(with_fitness(pts.back()));
    }
    for (std::size_t t = 0; t < pop.size(); ++t) {
        std::vector<std::size_t> up, down;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (testing::oracle_dominates(pts[j], pts[t])) {
                up.push_back(j);
            }
            if (testing::oracle_dominates(pts[t], pts[j])) {
                down.push_back(j);
            }
        }
        const auto rel = find_relations(pop, t);
        CHECK(rel.dominating == up);
        CHECK(rel.dominated == down);
    }

    std::vector<Individual> unevaluated{Individual(Genome::Zero(4))};
    CHECK_THROWS_AS(find_relations(unevaluated, 0), ContractError);
}

TEST_CASE("front draws are uniform")
{
    Random rng(12);
    const std::vector<std::size_t> single{7};
    CHECK(best_of_front(single, rng) == 7);

    const std::vector<std::size_t> front{3, 5, 8, 13};
    std::map<std::size_t, int> counts;
    for (int i = 0; i < 1000; ++i) {
        ++counts[best_of_front(front, rng)];
    }
    const double sigma = std::sqrt(1000 * 0.25 * 0.75);
    for (auto idx : front) {
        CHECK(std::abs(counts[idx] - 250.0) <= 3 * sigma);
    }
}

TEST_CASE("worst individual is the most dominated")
{
    Random rng(2);
    std::vector<Individual> pop{with_fitness({0.9, 0.1, 0.5}), with_fitness({0.1, 0.9, 0.5}),
                                with_fitness({0.05, 0.05, 0.05}), with_fitness({0.5, 0.5, 0.5})};
    for (int i = 0; i < 20; ++i) {
        CHECK(worst_of_population(pop, rng) == 2);
    }
    std::vector<Individual> tied{with_fitness({0.9, 0.1, 0.5}), with_fitness({0.1, 0.9, 0.5})};
    std::set<std::size_t> picks;
    for (int i = 0; i < 50; ++i) {
        picks.insert(worst_of_population(tied, rng));
    }
    CHECK(picks.size() == 2);
}
