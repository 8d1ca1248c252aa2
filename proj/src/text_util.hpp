#ifndef ZIPFMF_TEXT_UTIL_HPP
#define ZIPFMF_TEXT_UTIL_HPP

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace zipfmf::detail {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buf[40];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

// One CSV record, RFC-4180 quoting, trailing \r stripped.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t pos = 0; pos < line.size(); ++pos) {
        char c = line[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < line.size() && line[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace zipfmf::detail

#endif
