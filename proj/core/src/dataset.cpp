#include "hpwl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hpwl/errors.hpp"

namespace hpwl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, Eigen::Index row, Eigen::Index col) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw LoadError("cannot parse cell at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": \"" + s + "\"");
  if (!std::isfinite(v))
    throw LoadError("non-finite value at row " + std::to_string(row) + ", column " +
                    std::to_string(col));
  return v;
}

int parse_label(double v, Eigen::Index row, Eigen::Index col) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw LoadError("label at row " + std::to_string(row) + ", column " + std::to_string(col) +
                    " is not an integer class code");
  return static_cast<int>(r);
}

}  // namespace

DataMatrix load_csv(const std::filesystem::path& path, bool has_header,
                    const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file: " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
  }

  std::vector<std::string> header;
  if (has_header) {
    if (rows.empty()) throw LoadError("file has a header but no data rows: " + path.string());
    for (const auto& h : rows.front()) header.push_back(trim(h));
    rows.erase(rows.begin());
  }

  if (rows.size() < 2) throw LoadError("need at least 2 data rows, got " +
                                       std::to_string(rows.size()) + ": " + path.string());
  const Eigen::Index total_cols = static_cast<Eigen::Index>(rows.front().size());
  if (total_cols < 1) throw LoadError("first data row is empty: " + path.string());

  // Resolve the label column: header name first, then a 0-based index.
  Eigen::Index label_idx = -1;
  if (label_column) {
    if (has_header) {
      auto it = std::find(header.begin(), header.end(), *label_column);
      if (it != header.end()) label_idx = it - header.begin();
    }
    if (label_idx < 0) {
      int idx = -1;
      const std::string s = trim(*label_column);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
      if (ec == std::errc{} && ptr == s.data() + s.size() && idx >= 0 && idx < total_cols)
        label_idx = idx;
    }
    if (label_idx < 0)
      throw ConfigError("label column \"" + *label_column + "\" not found in " + path.string());
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = total_cols - (label_idx >= 0 ? 1 : 0);
  if (d < 1) throw LoadError("no feature columns remain after extracting labels");

  DataMatrix out;
  out.values.resize(n, d);
  Eigen::VectorXi labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != total_cols)
      throw LoadError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " cells, expected " + std::to_string(total_cols));
    Eigen::Index fj = 0;
    for (Eigen::Index j = 0; j < total_cols; ++j) {
      const double v = parse_cell(rows[i][static_cast<size_t>(j)], i, j);
      if (j == label_idx)
        labels(i) = parse_label(v, i, j);
      else
        out.values(i, fj++) = v;
    }
  }
  if (label_idx >= 0) out.labels = labels;

  if (has_header) {
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < total_cols; ++j)
      if (j != label_idx) names.push_back(header[static_cast<size_t>(j)]);
    out.feature_names = std::move(names);
  }
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.rows());
  Standardizer s;
  s.mean = x.colwise().mean();
  s.inv_scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    s.inv_scale(j) = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean).array().rowwise() * inv_scale.array();
}

DataMatrix standardize(const DataMatrix& x) {
  if (x.rows() < 2) throw ConfigError("standardize requires at least 2 rows");
  DataMatrix out = x;
  out.values = Standardizer::fit(x.values).apply(x.values);
  return out;
}

Split split_half(const DataMatrix& x, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ConfigError("split_half requires at least 2 rows");
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const size_t train_size = static_cast<size_t>((n + 1) / 2);
  Split s;
  s.seed = seed;
  s.train_indices.assign(idx.begin(), idx.begin() + train_size);
  s.test_indices.assign(idx.begin() + train_size, idx.end());
  return s;
}

}  // namespace hpwl
