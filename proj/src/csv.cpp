#include "drce/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "drce/errors.hpp"

namespace drce {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const std::string text = trim(cell);
  const auto fail = [&](const char* why) {
    throw InputError("row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": " + why + " ('" + text + "')");
  };
  if (text.empty()) fail("empty cell");
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) fail("not a decimal number");
  if (!std::isfinite(value)) fail("non-finite value");
  return value;
}

}  // namespace

Dataset parse_csv(std::istream& in, std::size_t covariate_dim,
                  std::size_t response_dim, bool has_header) {
  if (covariate_dim == 0 || response_dim == 0) {
    throw InputError("CSV column layout needs positive dimensions");
  }
  const std::size_t columns = covariate_dim + response_dim;
  std::vector<double> xs;
  std::vector<double> ys;

  std::string line;
  std::size_t row = 0;
  bool skipped_header = !has_header;
  while (std::getline(in, line)) {
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    ++row;
    if (trim(line).empty()) continue;
    std::stringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(cells, cell, ',')) {
      ++col;
      if (col > columns) break;
      const double value = parse_cell(cell, row, col);
      if (col <= covariate_dim) {
        xs.push_back(value);
      } else {
        ys.push_back(value);
      }
    }
    if (col != columns) {
      throw InputError("row " + std::to_string(row) + ": expected " +
                       std::to_string(columns) + " columns, found " +
                       std::to_string(col));
    }
  }
  if (xs.empty()) throw InputError("CSV contains no data rows");
  return Dataset(covariate_dim, response_dim, std::move(xs), std::move(ys));
}

Dataset load_csv(const std::string& path, std::size_t covariate_dim,
                 std::size_t response_dim, bool has_header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, covariate_dim, response_dim, has_header);
}

std::string format_value(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.covariate(i);
    const auto y = data.response(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j > 0) out << ',';
      out << format_value(x[j]);
    }
    for (double yj : y) out << ',' << format_value(yj);
    out << '\n';
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_dataset_csv(data, out);
}

}  // namespace drce
