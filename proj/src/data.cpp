#include "debias/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "debias/errors.hpp"

namespace debias {

std::vector<int> DataMatrix::rows_in_group(Group g) const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i) {
    if (groups[static_cast<std::size_t>(i)] == g) out.push_back(i);
  }
  return out;
}

int DataMatrix::group_count(Group g) const {
  int c = 0;
  for (Group x : groups) {
    if (x == g) ++c;
  }
  return c;
}

Eigen::MatrixXd DataMatrix::group_values(Group g) const {
  const std::vector<int> rows = rows_in_group(g);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
  return out;
}

DataMatrix DataMatrix::take_rows(const std::vector<int>& rows) const {
  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.values.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
  if (has_groups()) {
    out.groups.reserve(rows.size());
    for (int r : rows) out.groups.push_back(groups[static_cast<std::size_t>(r)]);
  }
  out.feature_names = feature_names;
  return out;
}

DataMatrix DataMatrix::take_columns(const std::vector<int>& cols) const {
  DataMatrix out;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.values.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
  out.groups = groups;
  if (!feature_names.empty()) {
    out.feature_names.reserve(cols.size());
    for (int c : cols) out.feature_names.push_back(feature_names[static_cast<std::size_t>(c)]);
  }
  return out;
}

void DataMatrix::validate() const {
  if (!values.allFinite()) throw InvalidArgument("data matrix contains non-finite entries");
  if (has_groups() && static_cast<int>(groups.size()) != n()) {
    throw InvalidArgument("group label count does not match row count");
  }
  if (!feature_names.empty() && static_cast<int>(feature_names.size()) != p()) {
    throw InvalidArgument("feature name count does not match column count");
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

DataMatrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trimmed(h);

  int group_col = -1;
  std::vector<std::string> names;
  std::vector<int> value_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "group") {
      if (group_col >= 0) throw ParseError(path + ": duplicate group column");
      group_col = static_cast<int>(j);
    } else {
      names.push_back(header[j]);
      value_cols.push_back(static_cast<int>(j));
    }
  }
  if (value_cols.empty()) throw ParseError(path + ": no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<Group> groups;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(value_cols.size());
    for (std::size_t j = 0; j < value_cols.size(); ++j) {
      const std::string cell = trimmed(fields[static_cast<std::size_t>(value_cols[j])]);
      if (cell.empty()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": missing value in column '" +
                         names[j] + "'");
      }
      double v = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad numeric value '" + cell +
                         "' in column '" + names[j] + "'");
      }
      row[j] = v;
    }
    if (group_col >= 0) {
      const std::string g = trimmed(fields[static_cast<std::size_t>(group_col)]);
      if (g == "control") {
        groups.push_back(Group::Control);
      } else if (g == "case") {
        groups.push_back(Group::Case);
      } else {
        throw ParseError(path + ":" + std::to_string(line_no) + ": group must be control or case, got '" + g + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(value_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < value_cols.size(); ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  out.groups = std::move(groups);
  out.feature_names = std::move(names);
  out.validate();
  return out;
}

void save_csv(const DataMatrix& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out.precision(17);
  for (int j = 0; j < d.p(); ++j) {
    if (j > 0) out << ',';
    out << (d.feature_names.empty() ? "f" + std::to_string(j + 1) : d.feature_names[static_cast<std::size_t>(j)]);
  }
  if (d.has_groups()) out << ",group";
  out << '\n';
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.p(); ++j) {
      if (j > 0) out << ',';
      out << d.values(i, j);
    }
    if (d.has_groups()) out << ',' << (d.groups[static_cast<std::size_t>(i)] == Group::Control ? "control" : "case");
    out << '\n';
  }
}

}  // namespace debias
