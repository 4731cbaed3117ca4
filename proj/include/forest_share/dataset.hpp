#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace forest_share {

/// Row-major n x d matrix of feature values with optional labels.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t n_rows, std::size_t n_features, std::vector<double> values,
          std::optional<std::vector<double>> labels = std::nullopt)
      : n_rows_(n_rows), n_features_(n_features), values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.size() != n_rows_ * n_features_) throw std::invalid_argument("dataset: value count != n*d");
    for (double v : values_)
      if (std::isnan(v)) throw std::invalid_argument("dataset: NaN feature value");
    if (labels_ && labels_->size() != n_rows_) throw std::invalid_argument("dataset: labels length != n");
  }

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::optional<std::vector<double>> labels = std::nullopt) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw std::invalid_argument("dataset: ragged rows");
      values.insert(values.end(), r.begin(), r.end());
    }
    return Dataset(rows.size(), d, std::move(values), std::move(labels));
  }

  std::size_t size() const { return n_rows_; }
  std::size_t n_features() const { return n_features_; }
  bool has_labels() const { return labels_.has_value(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_features_, n_features_};
  }
  double at(std::size_t i, std::size_t f) const { return values_[i * n_features_ + f]; }

  const std::vector<double>& labels() const {
    if (!labels_) throw std::logic_error("dataset has no labels");
    return *labels_;
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    std::vector<double> values;
    values.reserve(rows.size() * n_features_);
    std::optional<std::vector<double>> labels;
    if (labels_) labels.emplace();
    for (std::size_t r : rows) {
      auto x = row(r);
      values.insert(values.end(), x.begin(), x.end());
      if (labels_) labels->push_back((*labels_)[r]);
    }
    return Dataset(rows.size(), n_features_, std::move(values), std::move(labels));
  }

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> values_;
  std::optional<std::vector<double>> labels_;
};

struct CsvOptions {
  bool has_header = true;
  /// Column name or zero-based index. Unset: the last column is the label when the row
  /// width exceeds expected_features (or always, when expected_features is unset).
  std::optional<std::string> label_column;
  std::optional<std::size_t> expected_features;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw CsvError("line " + std::to_string(line_no) + ", column " + std::to_string(col) + ": not a number '" +
                   cell + "'");
  if (std::isnan(v)) throw CsvError("line " + std::to_string(line_no) + ": NaN values are not supported");
  return v;
}

}  // namespace detail

inline Dataset read_csv(std::istream& in, const CsvOptions& options = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  if (options.has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    header = detail::split_csv_line(line);
  }

  std::vector<std::vector<double>> rows;
  std::size_t width = header.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv_line(line);
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns, got " +
                     std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(detail::parse_cell(cells[c], line_no, c));
    rows.push_back(std::move(row));
  }

  std::optional<std::size_t> label_idx;
  if (options.label_column) {
    const std::string& want = *options.label_column;
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == want) label_idx = c;
    if (!label_idx) {
      bool numeric = !want.empty() && want.find_first_not_of("0123456789") == std::string::npos;
      if (!numeric || std::stoul(want) >= width) throw CsvError("label column '" + want + "' not found");
      label_idx = std::stoul(want);
    }
  } else if (width > 0 && (!options.expected_features || width > *options.expected_features)) {
    label_idx = width - 1;
  }

  const std::size_t d = label_idx ? width - 1 : width;
  if (options.expected_features && d != *options.expected_features)
    throw CsvError("dataset has " + std::to_string(d) + " feature columns, model expects " +
                   std::to_string(*options.expected_features));

  std::vector<double> values;
  values.reserve(rows.size() * d);
  std::optional<std::vector<double>> labels;
  if (label_idx) labels.emplace();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (label_idx && c == *label_idx)
        labels->push_back(r[c]);
      else
        values.push_back(r[c]);
    }
  return Dataset(rows.size(), d, std::move(values), std::move(labels));
}

inline Dataset read_csv_file(const std::string& path, const CsvOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open dataset '" + path + "'");
  return read_csv(in, options);
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Writes x0..x{d-1}[,y] with round-trip precision.
inline void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t f = 0; f < data.n_features(); ++f) out << (f ? "," : "") << "x" << f;
  if (data.has_labels()) out << (data.n_features() ? "," : "") << "y";
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.row(i);
    for (std::size_t f = 0; f < x.size(); ++f) out << (f ? "," : "") << format_double(x[f]);
    if (data.has_labels()) out << (x.empty() ? "" : ",") << format_double(data.labels()[i]);
    out << '\n';
  }
}

}  // namespace forest_share
