#include "aolink/csv.hpp"

#include <algorithm>
#include <cstdlib>

namespace aolink {

namespace {

std::vector<std::string> parse_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
        ++i;
    }
    if (quoted) {
        throw CsvError("unterminated quote on line " + std::to_string(line_no));
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_number(const std::string& cell, const std::string& column,
                    std::size_t row) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || end != begin + cell.size()) {
        throw CsvError("non-numeric cell '" + cell + "' in column '" + column +
                       "' at data row " + std::to_string(row + 1));
    }
    return value;
}

int parse_binary(const std::string& cell, const std::string& column,
                 std::size_t row) {
    if (cell == "0") return 0;
    if (cell == "1") return 1;
    throw CsvError("column '" + column + "' must be 0/1, got '" + cell +
                   "' at data row " + std::to_string(row + 1));
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw CsvError("no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = parse_line(line, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                throw CsvError("line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) {
        throw CsvError("input has no header row");
    }
    return table;
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& outcome_col,
                         const std::string& exposure_col,
                         const std::vector<std::string>& covariate_cols) {
    const std::size_t oc = table.column(outcome_col);
    const std::size_t ec = table.column(exposure_col);
    std::vector<std::size_t> cc;
    cc.reserve(covariate_cols.size());
    for (const auto& name : covariate_cols) {
        cc.push_back(table.column(name));
    }
    if (table.rows.empty()) {
        throw CsvError("input has no data rows");
    }

    Dataset data;
    const std::size_t n = table.rows.size();
    data.outcome.reserve(n);
    data.exposure.reserve(n);
    data.covariates.resize(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(cc.size()));
    data.covariate_names = covariate_cols;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        data.outcome.push_back(parse_binary(row[oc], outcome_col, r));
        data.exposure.push_back(parse_binary(row[ec], exposure_col, r));
        for (std::size_t j = 0; j < cc.size(); ++j) {
            data.covariates(static_cast<Eigen::Index>(r),
                            static_cast<Eigen::Index>(j)) =
                parse_number(row[cc[j]], covariate_cols[j], r);
        }
    }
    return data;
}

}  // namespace aolink
