#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace fctl {

// Fixed 6-significant-digit formatting keeps emitted tables byte-stable
// across runs.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::vector<std::string>& add_row() {
        rows.emplace_back(columns.size());
        return rows.back();
    }

    void push_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

inline std::string to_markdown(const Table& t) {
    std::string out = "|";
    for (const auto& c : t.columns) out += " " + c + " |";
    out += "\n|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += " --- |";
    out += '\n';
    for (const auto& row : t.rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell + " |";
        out += '\n';
    }
    return out;
}

}  // namespace fctl
