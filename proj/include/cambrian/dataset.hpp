#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cambrian/bitmap.hpp"

namespace cambrian {

using ItemIndex = std::uint32_t;

enum class ColumnKind { continuous, categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
};

/// Column-kind declarations. Columns not listed are inferred: continuous when
/// every non-missing value parses as a number, categorical otherwise.
/// Columns listed in `ignored` are dropped before binarization.
struct Schema {
    std::map<std::string, ColumnKind> kinds;
    std::vector<std::string> ignored;
    bool infer_numeric = true;
};

struct BinarizeOptions {
    std::size_t bins = 10;
    std::string missing = "?";
    /// Emit one item per bin even when no row falls in it.
    bool keep_empty_bins = false;
    char delimiter = ',';
};

/// Pre-binarization table. Every record holds exactly one value per column.
struct RawTable {
    std::vector<ColumnSpec> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
};

struct Item {
    std::string column;
    std::string label;

    friend bool operator==(const Item&, const Item&) = default;
};

class ItemCatalog {
public:
    ItemCatalog() = default;
    explicit ItemCatalog(std::vector<Item> items);

    std::size_t size() const noexcept { return items_.size(); }
    const Item& operator[](std::size_t i) const { return items_[i]; }
    std::span<const Item> items() const noexcept { return items_; }

    std::string describe(ItemIndex i) const { return items_[i].column + "=" + items_[i].label; }

    friend bool operator==(const ItemCatalog&, const ItemCatalog&) = default;

private:
    std::vector<Item> items_;
};

/// Immutable binarized dataset: one row bitmap per item.
class TransactionDB {
public:
    TransactionDB(ItemCatalog catalog, std::vector<Bitmap> bitmaps, std::size_t row_count);

    const ItemCatalog& catalog() const noexcept { return catalog_; }
    std::size_t item_count() const noexcept { return catalog_.size(); }
    std::size_t row_count() const noexcept { return row_count_; }
    const Bitmap& bitmap(ItemIndex item) const { return bitmaps_.at(item); }

    /// AND of the member bitmaps; the empty set yields every row.
    Bitmap item_rows(std::span<const ItemIndex> items) const;

    /// popcount(item_rows(items)) without materializing the intersection.
    std::size_t support_count(std::span<const ItemIndex> items) const;

private:
    void check_items(std::span<const ItemIndex> items) const;

    ItemCatalog catalog_;
    std::vector<Bitmap> bitmaps_;
    std::size_t row_count_;
};

RawTable read_table(std::istream& csv, const Schema& schema, const BinarizeOptions& options = {});

TransactionDB binarize(const RawTable& table, const BinarizeOptions& options = {});

TransactionDB load_and_binarize(std::istream& csv, const Schema& schema, const BinarizeOptions& options = {});

TransactionDB load_and_binarize_file(const std::string& path, const Schema& schema, const BinarizeOptions& options = {});

/// Catalog dump: JSON array of {column, value, item_index}.
nlohmann::json catalog_to_json(const ItemCatalog& catalog);
ItemCatalog catalog_from_json(const nlohmann::json& j);

/// Compact binary matrix cache: magic, row/item counts, catalog JSON, then
/// every item bitmap as little-endian 64-bit words.
void write_cache(std::ostream& out, const TransactionDB& db);
TransactionDB read_cache(std::istream& in);

ColumnKind parse_column_kind(const std::string& text);
Schema schema_from_json(const nlohmann::json& j);

} // namespace cambrian
