#include "cambrian/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cambrian/csv.hpp"
#include "cambrian/error.hpp"

namespace cambrian {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_number(const std::string& text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (*begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string bin_label(double lo, double hi, bool closed)
{
    return fmt::format("[{:.6f},{:.6f}{}", lo, hi, closed ? "]" : ")");
}

} // namespace

ItemCatalog::ItemCatalog(std::vector<Item> items) : items_(std::move(items)) {}

TransactionDB::TransactionDB(ItemCatalog catalog, std::vector<Bitmap> bitmaps, std::size_t row_count)
    : catalog_(std::move(catalog)), bitmaps_(std::move(bitmaps)), row_count_(row_count)
{
    detail::require(catalog_.size() == bitmaps_.size(), "catalog and bitmap counts differ");
    for (const auto& b : bitmaps_) {
        detail::require(b.size() == row_count_, "bitmap length differs from row count");
    }
}

void TransactionDB::check_items(std::span<const ItemIndex> items) const
{
    for (auto i : items) {
        if (i >= bitmaps_.size()) {
            throw ContractError(fmt::format("item index {} out of range (N = {})", i, bitmaps_.size()));
        }
    }
}

Bitmap TransactionDB::item_rows(std::span<const ItemIndex> items) const
{
    check_items(items);
    if (items.empty()) {
        return Bitmap::all(row_count_);
    }
    Bitmap out = bitmaps_[items.front()];
    for (auto i : items.subspan(1)) {
        out &= bitmaps_[i];
    }
    return out;
}

std::size_t TransactionDB::support_count(std::span<const ItemIndex> items) const
{
    check_items(items);
    if (items.empty()) {
        return row_count_;
    }
    if (items.size() == 1) {
        return bitmaps_[items.front()].count();
    }
    const auto first = bitmaps_[items.front()].words();
    std::size_t n = 0;
    for (std::size_t w = 0; w < first.size(); ++w) {
        auto word = first[w];
        for (auto i : items.subspan(1)) {
            word &= bitmaps_[i].words()[w];
        }
        n += static_cast<std::size_t>(std::popcount(word));
    }
    return n;
}

RawTable read_table(std::istream& in, const Schema& schema, const BinarizeOptions& options)
{
    auto records = csv::read(in, options.delimiter);
    if (records.empty()) {
        throw DatasetError("empty dataset: no header row");
    }
    const auto& header = records.front();
    const auto width = header.fields.size();

    std::vector<std::size_t> kept;
    RawTable table;
    for (std::size_t c = 0; c < width; ++c) {
        auto name = trim(header.fields[c]);
        if (std::find(schema.ignored.begin(), schema.ignored.end(), name) != schema.ignored.end()) {
            continue;
        }
        kept.push_back(c);
        table.columns.push_back({name, ColumnKind::categorical});
    }

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != width) {
            throw ParseError(rec.line, fmt::format("expected {} fields, found {}", width, rec.fields.size()));
        }
        std::vector<std::string> row;
        row.reserve(kept.size());
        for (auto c : kept) {
            row.push_back(trim(rec.fields[c]));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) {
        throw DatasetError("empty dataset: no data rows");
    }

    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        auto& column = table.columns[c];
        if (auto it = schema.kinds.find(column.name); it != schema.kinds.end()) {
            column.kind = it->second;
            if (column.kind == ColumnKind::continuous) {
                for (std::size_t r = 0; r < table.rows.size(); ++r) {
                    const auto& value = table.rows[r][c];
                    if (value != options.missing && !parse_number(value)) {
                        throw ParseError(records[r + 1].line,
                                         fmt::format("column '{}': '{}' is not a number", column.name, value));
                    }
                }
            }
            continue;
        }
        if (!schema.infer_numeric) {
            continue;
        }
        bool numeric = false;
        for (const auto& row : table.rows) {
            if (row[c] == options.missing) {
                continue;
            }
            if (!parse_number(row[c])) {
                numeric = false;
                break;
            }
            numeric = true;
        }
        column.kind = numeric ? ColumnKind::continuous : ColumnKind::categorical;
    }
    return table;
}

TransactionDB binarize(const RawTable& table, const BinarizeOptions& options)
{
    detail::require(options.bins >= 1, "bin count must be positive");
    const auto rows = table.row_count();
    if (rows == 0) {
        throw DatasetError("empty dataset: no data rows");
    }

    std::vector<Item> items;
    std::vector<Bitmap> bitmaps;

    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& column = table.columns[c];
        if (column.kind == ColumnKind::categorical) {
            std::set<std::string> values;
            for (const auto& row : table.rows) {
                if (row[c] != options.missing) {
                    values.insert(row[c]);
                }
            }
            const auto base = bitmaps.size();
            for (const auto& v : values) {
                items.push_back({column.name, v});
                bitmaps.emplace_back(rows);
            }
            for (std::size_t r = 0; r < rows; ++r) {
                const auto& v = table.rows[r][c];
                if (v == options.missing) {
                    continue;
                }
                const auto offset = static_cast<std::size_t>(std::distance(values.begin(), values.find(v)));
                bitmaps[base + offset].set(r);
            }
            continue;
        }

        std::vector<std::optional<double>> parsed(rows);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& v = table.rows[r][c];
            if (v == options.missing) {
                continue;
            }
            parsed[r] = parse_number(v);
            if (!parsed[r]) {
                throw ParseError(r + 2, fmt::format("column '{}': '{}' is not a number", column.name, v));
            }
            lo = std::min(lo, *parsed[r]);
            hi = std::max(hi, *parsed[r]);
        }
        if (lo > hi) {
            continue; // every value missing
        }
        const auto bins = options.bins;
        const double width = (hi - lo) / static_cast<double>(bins);
        std::vector<Bitmap> bin_rows(bins, Bitmap(rows));
        for (std::size_t r = 0; r < rows; ++r) {
            if (!parsed[r]) {
                continue;
            }
            std::size_t b = 0;
            if (width > 0.0) {
                const auto pos = std::floor((*parsed[r] - lo) / width);
                b = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
            }
            bin_rows[b].set(r);
        }
        for (std::size_t b = 0; b < bins; ++b) {
            if (!options.keep_empty_bins && bin_rows[b].none()) {
                continue;
            }
            const double bin_lo = lo + width * static_cast<double>(b);
            const double bin_hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
            items.push_back({column.name, bin_label(bin_lo, bin_hi, b + 1 == bins)});
            bitmaps.push_back(std::move(bin_rows[b]));
        }
    }

    if (items.size() < 2) {
        throw DatasetError(fmt::format("dataset yields {} item(s); at least 2 are required", items.size()));
    }
    return TransactionDB(ItemCatalog(std::move(items)), std::move(bitmaps), rows);
}

TransactionDB load_and_binarize(std::istream& csv, const Schema& schema, const BinarizeOptions& options)
{
    return binarize(read_table(csv, schema, options), options);
}

TransactionDB load_and_binarize_file(const std::string& path, const Schema& schema, const BinarizeOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DatasetError("cannot open dataset '" + path + "'");
    }
    try {
        return load_and_binarize(in, schema, options);
    } catch (const ParseError& e) {
        throw ParseError(e.row(), path + ": " + e.detail());
    } catch (const DatasetError& e) {
        throw DatasetError(path + ": " + e.what());
    }
}

nlohmann::json catalog_to_json(const ItemCatalog& catalog)
{
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        out.push_back({{"column", catalog[i].column}, {"value", catalog[i].label}, {"item_index", i}});
    }
    return out;
}

ItemCatalog catalog_from_json(const nlohmann::json& j)
{
    std::vector<Item> items(j.size());
    for (const auto& entry : j) {
        const auto index = entry.at("item_index").get<std::size_t>();
        if (index >= items.size()) {
            throw DatasetError("catalog item_index out of range");
        }
        items[index] = {entry.at("column").get<std::string>(), entry.at("value").get<std::string>()};
    }
    return ItemCatalog(std::move(items));
}

namespace {

constexpr char cache_magic[8] = {'C', 'A', 'M', 'B', 'R', 'D', 'B', '1'};

void put_u64(std::ostream& out, std::uint64_t v)
{
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
    }
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in)
{
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
        throw DatasetError("truncated cache file");
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | bytes[i];
    }
    return v;
}

} // namespace

void write_cache(std::ostream& out, const TransactionDB& db)
{
    out.write(cache_magic, sizeof cache_magic);
    put_u64(out, db.row_count());
    put_u64(out, db.item_count());
    const auto catalog = catalog_to_json(db.catalog()).dump();
    put_u64(out, catalog.size());
    out.write(catalog.data(), static_cast<std::streamsize>(catalog.size()));
    for (ItemIndex i = 0; i < db.item_count(); ++i) {
        for (auto w : db.bitmap(i).words()) {
            put_u64(out, w);
        }
    }
}

TransactionDB read_cache(std::istream& in)
{
    char magic[sizeof cache_magic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, cache_magic, sizeof magic) != 0) {
        throw DatasetError("not a dataset cache (bad magic)");
    }
    const auto rows = get_u64(in);
    const auto n_items = get_u64(in);
    const auto json_size = get_u64(in);
    std::string text(json_size, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(json_size))) {
        throw DatasetError("truncated cache file");
    }
    auto catalog = catalog_from_json(nlohmann::json::parse(text));
    if (catalog.size() != n_items) {
        throw DatasetError("cache catalog size mismatch");
    }
    std::vector<Bitmap> bitmaps;
    bitmaps.reserve(n_items);
    for (std::uint64_t i = 0; i < n_items; ++i) {
        Bitmap b(rows);
        for (auto& w : b.words()) {
            w = get_u64(in);
        }
        bitmaps.push_back(std::move(b));
    }
    return TransactionDB(std::move(catalog), std::move(bitmaps), rows);
}

ColumnKind parse_column_kind(const std::string& text)
{
    if (text == "continuous" || text == "numeric") {
        return ColumnKind::continuous;
    }
    if (text == "categorical" || text == "nominal") {
        return ColumnKind::categorical;
    }
    throw ConfigError("unknown column kind '" + text + "'");
}

Schema schema_from_json(const nlohmann::json& j)
{
    Schema schema;
    if (auto it = j.find("columns"); it != j.end()) {
        for (const auto& [name, kind] : it->items()) {
            schema.kinds[name] = parse_column_kind(kind.get<std::string>());
        }
    }
    if (auto it = j.find("ignore"); it != j.end()) {
        schema.ignored = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("infer_numeric"); it != j.end()) {
        schema.infer_numeric = it->get<bool>();
    }
    return schema;
}

} // namespace cambrian
