#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "thd/types.hpp"

namespace thd::csv {

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF and LF both accepted. Returns one
// string vector per record; a trailing newline does not produce an empty
// record.
inline std::vector<std::vector<std::string>> read(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        record_started = false;
    };

    char c;
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
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                    record_started = true;
                } else {
                    field.push_back(c);  // bare quote inside unquoted field, keep verbatim
                }
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                if (in.peek() == '\n') in.get(c);
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
                record_started = true;
        }
    }
    if (in_quotes) throw Error("csv: unterminated quoted field at end of input");
    if (record_started || field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

inline bool needs_quoting(const std::string& s) {
    if (!s.empty() && (s.front() == ' ' || s.back() == ' ')) return true;
    for (char c : s)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
    return false;
}

inline void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quoting(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << "\"\"";
        else out << c;
    }
    out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

}  // namespace thd::csv
