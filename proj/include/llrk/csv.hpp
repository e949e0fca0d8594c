#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace llrk {

/// 17-significant-digit decimal formatting keeps goldens byte-stable.
inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// A small CSV document: '#' comment header, column row, data rows.
struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const {
        std::string out;
        for (const std::string& c : comments) {
            out += "# ";
            out += c;
            out += '\n';
        }
        append_joined(out, columns);
        for (const auto& row : rows) append_joined(out, row);
        return out;
    }

private:
    static void append_joined(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    }
};

} // namespace llrk
