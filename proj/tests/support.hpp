#pragma once

// Shared fixtures for the unit tests and the acceptance driver.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "cambrian/dataset.hpp"
#include "cambrian/fitness.hpp"
#include "cambrian/random.hpp"
#include "cambrian/rule.hpp"

namespace testing {

using cambrian::Bitmap;
using cambrian::ItemCatalog;
using cambrian::TransactionDB;

inline std::string iris_path()
{
    return std::string(CAMBRIAN_DATA_DIR) + "/iris.csv";
}

/// Dense row x item membership, the oracle side of every bitmap comparison.
using Matrix = std::vector<std::vector<bool>>;

inline TransactionDB db_from_matrix(const Matrix& m, std::size_t items)
{
    std::vector<cambrian::Item> catalog;
    std::vector<Bitmap> bitmaps(items, Bitmap(m.size()));
    for (std::size_t i = 0; i < items; ++i) {
        catalog.push_back({"c" + std::to_string(i), "1"});
    }
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t i = 0; i < items; ++i) {
            if (m[r][i]) {
                bitmaps[i].set(r);
            }
        }
    }
    return TransactionDB(ItemCatalog(std::move(catalog)), std::move(bitmaps), m.size());
}

/// Database from explicit per-item row lists.
inline TransactionDB db_from_rows(std::size_t rows, const std::vector<std::vector<std::size_t>>& item_rows)
{
    Matrix m(rows, std::vector<bool>(item_rows.size(), false));
    for (std::size_t i = 0; i < item_rows.size(); ++i) {
        for (auto r : item_rows[i]) {
            m[r][i] = true;
        }
    }
    return db_from_matrix(m, item_rows.size());
}

inline Matrix random_matrix(cambrian::Random& rng, std::size_t rows, std::size_t items, double density)
{
    Matrix m(rows, std::vector<bool>(items, false));
    for (auto& row : m) {
        for (std::size_t i = 0; i < items; ++i) {
            row[i] = rng.uniform() < density;
        }
    }
    return m;
}

struct NaiveCounts {
    std::size_t a = 0, c = 0, ac = 0, rows = 0;
};

inline bool row_has(const std::vector<bool>& row, const std::vector<cambrian::ItemIndex>& items)
{
    return std::all_of(items.begin(), items.end(), [&](auto i) { return row[i]; });
}

inline NaiveCounts naive_counts(const Matrix& m, const cambrian::Rule& rule)
{
    NaiveCounts n;
    n.rows = m.size();
    for (const auto& row : m) {
        const bool a = row_has(row, rule.antecedent);
        const bool c = row_has(row, rule.consequent);
        n.a += a;
        n.c += c;
        n.ac += a && c;
    }
    return n;
}

inline cambrian::FitnessVector naive_fitness(const Matrix& m, const cambrian::Rule& rule)
{
    const auto n = naive_counts(m, rule);
    const double r = static_cast<double>(n.rows);
    cambrian::FitnessVector f;
    f.support = n.rows ? n.ac / r : 0.0;
    f.confidence = n.a ? static_cast<double>(n.ac) / n.a : 0.0;
    f.cosine = n.a && n.c ? n.ac / std::sqrt(static_cast<double>(n.a) * n.c) : 0.0;
    return f;
}

/// Random rule with disjoint non-empty sides over `items` items.
inline cambrian::Rule random_rule(cambrian::Random& rng, std::size_t items)
{
    const auto size = rng.between(2, items);
    auto picked = rng.sample(items, size);
    const auto split = rng.between(1, size - 1);
    cambrian::Rule rule;
    rule.antecedent.assign(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(split));
    rule.consequent.assign(picked.begin() + static_cast<std::ptrdiff_t>(split), picked.end());
    std::sort(rule.antecedent.begin(), rule.antecedent.end());
    std::sort(rule.consequent.begin(), rule.consequent.end());
    return rule;
}

/// Pairwise definition of domination, written out independently of the library.
inline bool oracle_dominates(const cambrian::FitnessVector& a, const cambrian::FitnessVector& b)
{
    const bool ge = a.support >= b.support && a.confidence >= b.confidence && a.cosine >= b.cosine;
    const bool gt = a.support > b.support || a.confidence > b.confidence || a.cosine > b.cosine;
    return ge && gt;
}

inline std::vector<std::size_t> oracle_front(const std::vector<cambrian::FitnessVector>& pts)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            dominated = oracle_dominates(pts[j], pts[i]);
        }
        if (!dominated) {
            out.push_back(i);
        }
    }
    return out;
}

/// Fitness vectors on a coarse grid so that ties and duplicates are common.
inline cambrian::FitnessVector random_point(cambrian::Random& rng, std::size_t levels = 6)
{
    auto v = [&] { return static_cast<double>(rng.index(levels)) / static_cast<double>(levels - 1); };
    const double s = v();
    const double c = v();
    const double k = v();
    return {s, c, k};
}

/// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                fmt::format("cambrian_{}_{}_{}", tag, ::getpid(), counter++);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& child = "") const { return (child.empty() ? path_ : path_ / child).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testing
