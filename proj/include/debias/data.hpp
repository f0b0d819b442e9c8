#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace debias {

enum class Group : std::uint8_t { Control = 0, Case = 1 };

/// n x p observation matrix, optionally with per-row group labels and
/// per-column feature names.
struct DataMatrix {
  Eigen::MatrixXd values;                  // n x p
  std::vector<Group> groups;               // empty, or one label per row
  std::vector<std::string> feature_names;  // empty, or one name per column

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
  bool has_groups() const { return !groups.empty(); }

  std::vector<int> rows_in_group(Group g) const;
  int group_count(Group g) const;

  /// Submatrix holding only the rows of one group (labels dropped).
  Eigen::MatrixXd group_values(Group g) const;

  /// New DataMatrix keeping the given rows (group labels follow).
  DataMatrix take_rows(const std::vector<int>& rows) const;

  /// New DataMatrix keeping the given columns (feature names follow).
  DataMatrix take_columns(const std::vector<int>& cols) const;

  /// Throws on non-finite entries or label/name size mismatches.
  void validate() const;
};

/// Loads a CSV with a header row of feature names. An optional column named
/// "group" carries control/case labels; all other cells must be finite
/// numbers. Parse failures report row and column.
DataMatrix load_csv(const std::string& path);

/// Writes the matrix in the same format load_csv reads.
void save_csv(const DataMatrix& d, const std::string& path);

}  // namespace debias
