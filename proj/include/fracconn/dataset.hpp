#ifndef FRACCONN_DATASET_HPP
#define FRACCONN_DATASET_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace fracconn::io {

/// Ingested multichannel time-series matrix; rows are series.
struct Dataset {
  std::vector<std::string> labels;
  Eigen::MatrixXd series;  // q x N
  std::string source;
  int discarded_samples = 0;  // tail dropped by power-of-two truncation

  int dimension() const { return static_cast<int>(series.rows()); }
  int length() const { return static_cast<int>(series.cols()); }
};

struct IngestOptions {
  char delimiter = ',';
  bool series_in_columns = true;  // false: rows are series
  bool header_row = true;
  int min_length = 256;
};

/// Reads a rectangular delimited table; truncates the time axis to the
/// largest power of two. Rejects ragged rows, non-numeric cells (with
/// coordinates), duplicate labels, fewer than 2 series, and short series.
Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options = {});

struct LabeledMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

/// Square matrix with a label header row and label column; values at
/// 17 significant digits so a write/read round trip is exact.
void write_matrix_csv(const std::filesystem::path& path, const LabeledMatrix& matrix);
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& labels,
                      const Eigen::VectorXd& values, const std::string& value_header);

/// Series matrix (time in rows, series in columns) for simulate output.
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& series);

struct Edge {
  std::string a;
  std::string b;
  double weight;
};

/// Top-k off-diagonal entries of a symmetric matrix by |weight|; ties broken
/// by label order.
std::vector<Edge> top_edges(const LabeledMatrix& matrix, int k);

void write_edges_csv(const std::filesystem::path& path, const std::vector<Edge>& edges);

/// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string format_value(double v);  // 17 significant digits

}  // namespace fracconn::io

#endif  // FRACCONN_DATASET_HPP
