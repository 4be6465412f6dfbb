#include "edwsvr/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edwsvr/textio.hpp"

namespace edwsvr {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail_line(const std::string& path, std::size_t lineno, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

double parse_cell(const std::string& tok, const std::string& path, std::size_t lineno) {
  double v;
  if (!try_parse_double(tok, v)) fail_line(path, lineno, "non-numeric cell '" + tok + "'");
  if (!std::isfinite(v)) fail_line(path, lineno, "non-finite value '" + tok + "'");
  return v;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  auto names = split(header, ',');
  const std::size_t width = names.size();

  std::ptrdiff_t target_idx = -1;
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == target_column) target_idx = static_cast<std::ptrdiff_t>(j);
  if (target_idx < 0) {
    long idx;
    if (try_parse_long(target_column, idx) && idx >= 0 && static_cast<std::size_t>(idx) < width)
      target_idx = idx;
  }
  if (target_idx < 0)
    throw std::runtime_error(path + ": target column '" + target_column + "' not found");

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != width)
      fail_line(path, lineno,
                "expected " + std::to_string(width) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = parse_cell(cells[j], path, lineno);
      if (static_cast<std::ptrdiff_t>(j) == target_idx)
        ys.push_back(v);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.features.resize(n, d);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
    data.targets(i) = ys[i];
  }
  data.feature_names.reserve(width - 1);
  for (std::size_t j = 0; j < width; ++j)
    if (static_cast<std::ptrdiff_t>(j) != target_idx) data.feature_names.push_back(names[j]);
  data.target_name = names[target_idx];
  data.validate();
  return data;
}

Dataset load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  struct Row {
    double target;
    std::vector<std::pair<long, double>> entries;
  };
  std::vector<Row> rows;
  long max_index = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    Row row;
    if (!try_parse_double(tok, row.target) || !std::isfinite(row.target))
      fail_line(path, lineno, "bad target '" + tok + "'");
    long prev = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) fail_line(path, lineno, "expected index:value, got '" + tok + "'");
      long idx;
      double v;
      if (!try_parse_long(tok.substr(0, colon), idx) || idx < 1)
        fail_line(path, lineno, "bad feature index in '" + tok + "'");
      if (idx <= prev) fail_line(path, lineno, "indices must be ascending and 1-based");
      if (!try_parse_double(tok.substr(colon + 1), v) || !std::isfinite(v))
        fail_line(path, lineno, "bad feature value in '" + tok + "'");
      row.entries.emplace_back(idx, v);
      prev = idx;
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty file");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.features = Eigen::MatrixXd::Zero(n, max_index);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.targets(i) = rows[i].target;
    for (auto [idx, v] : rows[i].entries) data.features(i, idx - 1) = v;
  }
  data.validate();
  return data;
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() < 1) throw std::invalid_argument("dataset: need at least one row");
  if (targets.size() != features.rows())
    throw std::invalid_argument("dataset: targets length does not match row count");
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != features.cols())
    throw std::invalid_argument("dataset: feature_names length does not match column count");
  if (!features.allFinite() || !targets.allFinite())
    throw std::invalid_argument("dataset: non-finite entry");
}

Dataset load_dataset(const std::string& path, DataFormat format, const std::string& target_column) {
  return format == DataFormat::csv ? load_csv(path, target_column) : load_sparse(path);
}

void save_dataset(const Dataset& data, const std::string& path, DataFormat format) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (format == DataFormat::csv) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      out << (data.feature_names.empty() ? "x" + std::to_string(j + 1) : data.feature_names[j]);
      out << ',';
    }
    out << (data.target_name.empty() ? "target" : data.target_name) << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      for (Eigen::Index j = 0; j < data.dim(); ++j) out << format_double(data.features(i, j)) << ',';
      out << format_double(data.targets(i)) << '\n';
    }
  } else {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      out << format_double(data.targets(i));
      for (Eigen::Index j = 0; j < data.dim(); ++j)
        if (data.features(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(data.features(i, j));
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(data.n()))
      throw std::invalid_argument("subset: row index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(rows[i]));
    out.targets(static_cast<Eigen::Index>(i)) = data.targets(static_cast<Eigen::Index>(rows[i]));
  }
  out.feature_names = data.feature_names;
  out.target_name = data.target_name;
  return out;
}

}  // namespace edwsvr
