#include "fracconn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fracconn/errors.hpp"

namespace fracconn::io {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& cell, int row, int col) {
  const std::string t = trim(cell);
  try {
    size_t consumed = 0;
    const double v = std::stod(t, &consumed);
    if (consumed != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw invalid_input("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                        ", column " + std::to_string(col));
  }
}

int largest_power_of_two_below(int n) {
  int p = 1;
  while (2 * p <= n) p *= 2;
  return p;
}

}  // namespace

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw invalid_input("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot read '" + path.string() + "'");

  std::vector<std::vector<std::string>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    table.push_back(split_line(line, options.delimiter));
  }
  if (table.empty()) throw invalid_input("'" + path.string() + "' is empty");

  const size_t cols = table.front().size();
  for (size_t r = 0; r < table.size(); ++r) {
    if (table[r].size() != cols) {
      throw invalid_input("ragged row " + std::to_string(r + 1) + " in '" +
                          path.string() + "' (" + std::to_string(table[r].size()) +
                          " cells, expected " + std::to_string(cols) + ")");
    }
  }

  std::vector<std::string> labels;
  size_t data_start = 0;
  if (options.header_row) {
    for (const auto& cell : table.front()) labels.push_back(trim(cell));
    data_start = 1;
  }

  const size_t data_rows = table.size() - data_start;
  if (data_rows == 0) throw invalid_input("no data rows in '" + path.string() + "'");

  Eigen::MatrixXd raw(data_rows, cols);
  for (size_t r = 0; r < data_rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(table[r + data_start][c], static_cast<int>(r + data_start + 1),
                     static_cast<int>(c + 1));
    }
  }

  Dataset ds;
  ds.source = path.string();
  ds.series = options.series_in_columns ? raw.transpose() : raw;
  if (!options.series_in_columns && options.header_row) {
    // Header labeled time points, not series; synthesize below.
    labels.clear();
  }

  const int q = ds.dimension();
  if (q < 2) throw invalid_input("need at least 2 series, got " + std::to_string(q));

  if (labels.empty()) {
    for (int k = 0; k < q; ++k) labels.push_back("S" + std::to_string(k + 1));
  }
  std::set<std::string> seen;
  std::vector<std::string> dups;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) dups.push_back(l);
  }
  if (!dups.empty()) {
    std::string msg = "duplicate series labels:";
    for (const auto& d : dups) msg += " " + d;
    throw invalid_input(msg);
  }
  ds.labels = labels;

  if (!ds.series.allFinite()) {
    throw invalid_input("'" + path.string() + "' contains non-finite values");
  }

  const int n_raw = ds.length();
  const int n = largest_power_of_two_below(n_raw);
  if (n < options.min_length) {
    throw insufficient_data("series too short: " + std::to_string(n) +
                        " samples after power-of-two truncation, need >= " +
                        std::to_string(options.min_length));
  }
  ds.discarded_samples = n_raw - n;
  ds.series = ds.series.leftCols(n).eval();
  return ds;
}

void write_matrix_csv(const std::filesystem::path& path, const LabeledMatrix& matrix) {
  const int q = static_cast<int>(matrix.values.rows());
  if (matrix.values.cols() != q || static_cast<int>(matrix.labels.size()) != q) {
    throw invalid_input("labeled matrix must be square with one label per row");
  }
  std::string out = "label";
  for (const auto& l : matrix.labels) out += "," + l;
  out += "\n";
  for (int r = 0; r < q; ++r) {
    out += matrix.labels[static_cast<size_t>(r)];
    for (int c = 0; c < q; ++c) out += "," + format_value(matrix.values(r, c));
    out += "\n";
  }
  atomic_write(path, out);
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw invalid_input("'" + path.string() + "' is empty");
  const auto header = split_line(line, ',');
  if (header.size() < 2) throw invalid_input("matrix header too short");
  LabeledMatrix m;
  for (size_t c = 1; c < header.size(); ++c) m.labels.push_back(trim(header[c]));
  const int q = static_cast<int>(m.labels.size());
  m.values.resize(q, q);
  int r = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (r >= q) throw invalid_input("matrix has more rows than labels");
    const auto cells = split_line(line, ',');
    if (static_cast<int>(cells.size()) != q + 1) {
      throw invalid_input("matrix row " + std::to_string(r + 2) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(q + 1));
    }
    if (trim(cells[0]) != m.labels[static_cast<size_t>(r)]) {
      throw invalid_input("row label '" + cells[0] + "' does not match header order");
    }
    for (int c = 0; c < q; ++c) {
      m.values(r, c) = parse_cell(cells[static_cast<size_t>(c + 1)], r + 2, c + 2);
    }
    ++r;
  }
  if (r != q) throw invalid_input("matrix has fewer rows than labels");
  return m;
}

void write_vector_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& labels,
                      const Eigen::VectorXd& values, const std::string& value_header) {
  if (static_cast<Eigen::Index>(labels.size()) != values.size()) {
    throw invalid_input("label and value counts disagree");
  }
  std::string out = "label," + value_header + "\n";
  for (size_t k = 0; k < labels.size(); ++k) {
    out += labels[k] + "," + format_value(values[static_cast<Eigen::Index>(k)]) + "\n";
  }
  atomic_write(path, out);
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& series) {
  if (static_cast<Eigen::Index>(labels.size()) != series.rows()) {
    throw invalid_input("label count must match series count");
  }
  std::string out;
  for (size_t k = 0; k < labels.size(); ++k) {
    if (k > 0) out += ",";
    out += labels[k];
  }
  out += "\n";
  for (Eigen::Index t = 0; t < series.cols(); ++t) {
    for (Eigen::Index k = 0; k < series.rows(); ++k) {
      if (k > 0) out += ",";
      out += format_value(series(k, t));
    }
    out += "\n";
  }
  atomic_write(path, out);
}

std::vector<Edge> top_edges(const LabeledMatrix& matrix, int k) {
  if (k < 1) throw invalid_input("edge count must be >= 1");
  const int q = static_cast<int>(matrix.values.rows());
  if ((matrix.values - matrix.values.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw invalid_input("connectivity matrix is not symmetric within 1e-9");
  }
  std::vector<Edge> edges;
  for (int m = 0; m < q; ++m) {
    for (int n = m + 1; n < q; ++n) {
      edges.push_back({matrix.labels[static_cast<size_t>(m)],
                       matrix.labels[static_cast<size_t>(n)], matrix.values(m, n)});
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (std::abs(x.weight) != std::abs(y.weight)) {
      return std::abs(x.weight) > std::abs(y.weight);
    }
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  if (static_cast<int>(edges.size()) > k) edges.resize(static_cast<size_t>(k));
  return edges;
}

void write_edges_csv(const std::filesystem::path& path, const std::vector<Edge>& edges) {
  std::string out = "source,target,weight\n";
  for (const auto& e : edges) {
    out += e.a + "," + e.b + "," + format_value(e.weight) + "\n";
  }
  atomic_write(path, out);
}

}  // namespace fracconn::io
