#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "drce/dataset.hpp"

namespace drce {

/// Read a dataset from CSV. Columns are x_1..x_n followed by y_1..y_m; every
/// cell must parse as a finite decimal. Parse failures raise InputError
/// naming the 1-based row and column; a leading header row is skipped when
/// `has_header` is set.
Dataset load_csv(const std::string& path, std::size_t covariate_dim,
                 std::size_t response_dim, bool has_header = false);

Dataset parse_csv(std::istream& in, std::size_t covariate_dim,
                  std::size_t response_dim, bool has_header = false);

/// Write the dataset with 17 significant digits so a round trip through
/// load_csv reproduces every value exactly.
void write_dataset_csv(const Dataset& data, const std::string& path);
void write_dataset_csv(const Dataset& data, std::ostream& out);

/// Shortest-faithful decimal rendering used for all numeric CSV output.
std::string format_value(double v);

}  // namespace drce
