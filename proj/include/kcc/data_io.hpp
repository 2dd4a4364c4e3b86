#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kcc {

/// n x d data, rows are points.
struct Dataset {
    Eigen::MatrixXd X;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> label_names; ///< original label text per label id, if read from a file
    std::string provenance;

    int n() const { return static_cast<int>(X.rows()); }
    int d() const { return static_cast<int>(X.cols()); }
};

inline constexpr int kCirclePoints = 200;
inline constexpr int kBlobPoints = 50;
inline constexpr double kCircleRadius = 3.0;
inline constexpr double kCircleNoiseSd = 0.1; // variance 0.01
inline constexpr double kBlobRadius = 0.45;
inline constexpr double kBlobRingRadius = 1.5;

/// A noisy radius-3 circle of 200 points (label 0) around `n_blobs` uniform
/// disks of 50 points each (labels 1..n_blobs). Blob centres sit equispaced on
/// a radius-1.5 ring starting at angle 0; a single blob sits at the origin.
Dataset gen_rings_blobs(int n_blobs, std::uint64_t seed);

/// Column selector: a 0-based index (negative counts from the end) or a header name.
using LabelColumn = std::variant<long, std::string>;

/// Comma-separated numeric data with an optional single header row. When a
/// label column is given its cells may be arbitrary text; labels are numbered
/// in order of first appearance. Throws ParseError with 1-based row/column.
Dataset load_csv(const std::filesystem::path& path, bool has_header,
                 const std::optional<LabelColumn>& label_column = std::nullopt);
Dataset parse_csv(std::istream& in, bool has_header, const std::optional<LabelColumn>& label_column,
                  const std::string& provenance = "stream");

/// Centres each column and divides by its population standard deviation.
/// Constant columns become zero.
Dataset standardize(const Dataset& d);

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out, const std::vector<std::string>& header = {});
void write_labels_csv(const std::vector<int>& labels, std::ostream& out);

} // namespace kcc
