#include "cambrian/csv.hpp"

#include "cambrian/error.hpp"

namespace cambrian::csv {

std::vector<Record> read(std::istream& in, char delimiter)
{
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_has_content = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        if (record_has_content) {
            end_field();
            records.push_back(std::move(current));
        }
        current = Record{};
        field.clear();
        field_started = false;
        record_has_content = false;
    };

    char c = 0;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        if (c == '\r') {
            continue;
        }
        if (c == '\n') {
            end_record();
            ++line;
            current.line = line;
            continue;
        }
        if (!record_has_content) {
            current.line = line;
        }
        record_has_content = true;
        if (c == delimiter) {
            end_field();
        } else if (c == '"' && !field_started && field.empty()) {
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw ParseError(current.line, "unterminated quoted field");
    }
    end_record();
    return records;
}

} // namespace cambrian::csv
