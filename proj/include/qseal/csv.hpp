#pragma once

// Rectangular CSV tables with round-trippable number formatting.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qseal {

// Blank (not applicable), real, integer, or boolean.
using CsvCell = std::variant<std::monostate, double, std::int64_t, bool>;

// 17 significant digits: parsing the text and reformatting gives the same text.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_cell(const CsvCell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<CsvCell> row) {
        if (row.size() != header_.size())
            throw std::invalid_argument("CsvTable: row has " + std::to_string(row.size()) + " cells, header has " +
                                        std::to_string(header_.size()));
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header_.size(); ++k)
            if (header_[k] == name) return k;
        throw std::out_of_range("CsvTable: no column " + name);
    }

    void write(std::ostream& os) const {
        write_line(os, header_);
        for (const auto& row : rows_) {
            std::vector<std::string> cells;
            cells.reserve(row.size());
            for (const auto& c : row) cells.push_back(format_cell(c));
            write_line(os, cells);
        }
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) os << ',';
            os << cells[k];
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace qseal
