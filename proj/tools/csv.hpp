#pragma once

#include "firth/dataset.hpp"

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace firth::cli {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> covariate_names;
    std::vector<RawRecord> rows;
};

/// Reads `y,m,x1,...,xp` with a header row. LF or CRLF line endings; blank
/// lines are skipped; every field must be a decimal number.
CsvTable parse_csv(std::istream& in);

}  // namespace firth::cli
