#include "metasel/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace metasel {

Study convert_to_d(double statistic, const std::string& stat_type, double df) {
  if (!(df >= 1.0)) throw std::domain_error("convert_to_d: df must be >= 1");
  double t;
  if (stat_type == "t") {
    t = statistic;
  } else if (stat_type == "F") {
    if (statistic < 0.0)
      throw std::domain_error("convert_to_d: negative F statistic");
    t = std::sqrt(statistic);
  } else {
    throw std::domain_error("convert_to_d: stat_type must be t or F");
  }
  const double d = t * std::sqrt(2.0 / df);
  const double n_total = df + 2.0;
  const double se = std::sqrt(4.0 / n_total + d * d / (2.0 * n_total));
  return Study(d, se);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

int find_col(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

double parse_num(const std::string& s, int line_no,
                 std::vector<std::string>& errors) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    errors.push_back("line " + std::to_string(line_no) +
                     ": not a number: '" + s + "'");
    return std::nan("");
  }
}

}  // namespace

Dataset parse_dataset(std::istream& is) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw ParseError("empty input: no header row");

  const int ci_effect = find_col(header, "effect");
  const int ci_se = find_col(header, "se");
  const int ci_stat = find_col(header, "statistic");
  const int ci_type = find_col(header, "stat_type");
  const int ci_df = find_col(header, "df");
  const int ci_sign = find_col(header, "sign");

  const bool direct = ci_effect >= 0 && ci_se >= 0;
  const bool converted = ci_stat >= 0 && ci_type >= 0 && ci_df >= 0;
  if (!direct && !converted)
    throw ParseError(
        "header must contain (effect, se) or (statistic, stat_type, df)");

  Dataset out;
  std::vector<std::string> errors;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      errors.push_back("line " + std::to_string(line_no) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
      continue;
    }
    try {
      if (direct) {
        const double effect = parse_num(fields[ci_effect], line_no, errors);
        const double se = parse_num(fields[ci_se], line_no, errors);
        if (std::isnan(effect) || std::isnan(se)) continue;
        out.emplace_back(effect, se);
      } else {
        const double stat = parse_num(fields[ci_stat], line_no, errors);
        const double df = parse_num(fields[ci_df], line_no, errors);
        if (std::isnan(stat) || std::isnan(df)) continue;
        Study st = convert_to_d(stat, fields[ci_type], df);
        if (ci_sign >= 0) {
          const double sign = parse_num(fields[ci_sign], line_no, errors);
          if (!std::isnan(sign) && sign < 0.0) st.effect = -st.effect;
        }
        out.push_back(st);
      }
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "dataset parse failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ParseError(msg);
  }
  if (out.empty()) throw ParseError("dataset contains no studies");
  return out;
}

Dataset parse_dataset_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open file: " + path);
  return parse_dataset(is);
}

}  // namespace metasel
