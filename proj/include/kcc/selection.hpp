#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kcc {

enum class Linkage { average, single, complete, ward };

std::string to_string(Linkage linkage);
Linkage linkage_from_string(const std::string& name);

/// One agglomeration step. Leaves are ids 0..n-1; the cluster formed by
/// merge t gets id n + t.
struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    int n = 0;
    std::vector<Merge> merges; ///< n - 1 merges, heights non-decreasing
};

/// Agglomerative clustering of the columns of `centroids` under Euclidean
/// distance. Ties between equal distances go to the lowest slot pair.
Dendrogram agglomerate(const Eigen::MatrixXd& centroids, Linkage linkage = Linkage::average);

/// Partition after the first n - k merges, labelled in order of first appearance.
std::vector<int> cut(const Dendrogram& d, int k);

/// Within-cluster sum of squared deviations of the columns of `points`.
double within_cluster_sse(const Eigen::MatrixXd& points, const std::vector<int>& labels);

struct SseCurve {
    std::vector<double> values; ///< values[k - 1] = SSE_k

    int k_max() const { return static_cast<int>(values.size()); }
    double at(int k) const { return values.at(static_cast<std::size_t>(k - 1)); }
};

SseCurve sse_curve(const Eigen::MatrixXd& centroids, const Dendrogram& d, int k_max);

/// Largest second difference of the SSE curve normalized by SSE_1:
/// argmax over k in [2, k_max - 1] of (D_k - D_{k+1}), D_k = SSE_{k-1} - SSE_k.
/// Ties (within 1e-12) go to the smaller k. A flat curve (SSE_1 = 0) gives 1.
int elbow(const SseCurve& curve);

enum class SelectionMode { auto_elbow, manual };

std::string to_string(SelectionMode mode);

struct ClusterSelection {
    int chosen_k = 1;
    std::vector<int> labels;
    SseCurve sse;
    SelectionMode mode = SelectionMode::auto_elbow;
    Dendrogram dendrogram;
};

inline int default_k_max(int n) { return n < 15 ? n : 15; }

/// Full model selection: dendrogram, SSE_k for k = 1..k_max, elbow (or the
/// manual k), labels from the chosen cut.
ClusterSelection select_clusters(const Eigen::MatrixXd& centroids, std::optional<int> k_max = std::nullopt,
                                 std::optional<int> manual_k = std::nullopt,
                                 Linkage linkage = Linkage::average);

void write_sse_csv(const SseCurve& curve, std::ostream& out);
void write_dendrogram_csv(const Dendrogram& d, std::ostream& out);

} // namespace kcc
