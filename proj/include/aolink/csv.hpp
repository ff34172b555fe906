#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aolink/glm.hpp"

namespace aolink {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed CSV with a mandatory header row. Quoted fields per RFC 4180.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws CsvError if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

// Builds a model dataset from named CSV columns. Outcome and exposure must
// be 0/1; covariate cells must parse as numbers, no coercion of anything else.
Dataset dataset_from_csv(const CsvTable& table, const std::string& outcome_col,
                         const std::string& exposure_col,
                         const std::vector<std::string>& covariate_cols);

}  // namespace aolink
