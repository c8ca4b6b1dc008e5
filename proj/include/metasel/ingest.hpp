#pragma once

#include <iosfwd>
#include <string>

#include "metasel/types.hpp"

namespace metasel {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// d = t * sqrt(2/df) (t = sqrt(F) for F statistics), with
// se(d) = sqrt(4/N + d^2/(2N)), N = df + 2, the equal-group two-cell form.
Study convert_to_d(double statistic, const std::string& stat_type, double df);

// CSV with header; accepts (effect, se) or (statistic, stat_type, df)
// columns, optional sign column, '#' comments. Malformed rows are reported
// with line numbers in a ParseError.
Dataset parse_dataset(std::istream& is);
Dataset parse_dataset_file(const std::string& path);

}  // namespace metasel
