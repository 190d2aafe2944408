#ifndef REPAYFACTOR_CSV_HPP
#define REPAYFACTOR_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "repayfactor/types.hpp"

namespace repayfactor::csv {

/// RFC-4180 record reader. Handles quoted fields with embedded commas,
/// quotes, and newlines. Returns false at end of input.
inline bool read_record(std::istream& in, std::vector<std::string>& out) {
    out.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            out.push_back(field);
            return true;
        }
        any = true;
        if (in_quotes) {
            if (c == '"') {
                int next = in.get();
                if (next == '"') {
                    field.push_back('"');
                } else {
                    in_quotes = false;
                    c = next;
                    continue;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else {
            if (c == '"' && field.empty()) {
                in_quotes = true;
            } else if (c == ',') {
                out.push_back(field);
                field.clear();
            } else if (c == '\r') {
                // swallow; CRLF handled at '\n'
            } else if (c == '\n') {
                out.push_back(field);
                return true;
            } else {
                field.push_back(static_cast<char>(c));
            }
        }
        c = in.get();
    }
    (void)any;
}

inline std::string escape_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

inline void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

/// 17 significant digits, '.' decimal, no separators.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct File {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline File read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    File f;
    if (!read_record(in, f.header)) throw ParseError("empty CSV file: " + path);
    std::vector<std::string> rec;
    while (read_record(in, rec)) {
        if (rec.size() == 1 && rec[0].empty()) continue;  // trailing blank line
        f.rows.push_back(rec);
    }
    return f;
}

}  // namespace repayfactor::csv

#endif  // REPAYFACTOR_CSV_HPP
