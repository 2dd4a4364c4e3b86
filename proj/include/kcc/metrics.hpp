#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace kcc {

/// Counts n_uv of points with true label u and predicted label v. Labels are
/// arbitrary integers; rows and columns follow first appearance.
struct ContingencyTable {
    Eigen::MatrixXd counts;
    Eigen::VectorXd row_sums;
    Eigen::VectorXd col_sums;
    double total = 0.0;

    static ContingencyTable from_labels(std::span<const int> truth, std::span<const int> pred);
};

/// Mutual information over the arithmetic mean of the two entropies (natural
/// log). 1 when both labelings have a single cluster.
double nmi(std::span<const int> truth, std::span<const int> pred);

/// Adjusted Rand index from pair counts. 1 when the adjustment is degenerate
/// (both partitions trivial and identical).
double ari(std::span<const int> truth, std::span<const int> pred);

} // namespace kcc
