#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace kcc {

struct Edge {
    int i = 0; ///< always i < j
    int j = 0;
    double weight = 0.0;
};

/// Symmetrized k-nearest-neighbour Gaussian fusion weights. Only positive
/// weights are stored; every other pair has weight zero.
struct WeightGraph {
    int n = 0;
    std::vector<Edge> edges; ///< sorted by (i, j), no duplicates
    int knn = 0;
    double sigma2 = 0.0;

    /// Smallest positive weight, or 0 for an edgeless graph.
    double min_weight() const;
    /// Dense n x n symmetric weight matrix (zero diagonal).
    Eigen::MatrixXd dense() const;
};

/// Raw weights w_ij = exp(-|x_i - x_j|^2 / (2 sigma2^2)) when x_j is one of the
/// `knn` nearest neighbours of x_i (ties go to the lower index), then
/// w*_ij = (w_ij + w_ji) / 2. Rows of `data` are points.
WeightGraph knn_gaussian_weights(const Eigen::MatrixXd& data, int knn, double sigma2);

/// Graph with every pair i < j weighted `weight`.
WeightGraph complete_graph(int n, double weight = 1.0);

/// Builds a graph from explicit edges; validates and sorts them.
WeightGraph graph_from_edges(int n, std::vector<Edge> edges);

/// Connected component id per point of the positive-weight graph, numbered
/// in order of the smallest member.
std::vector<int> components(const WeightGraph& g);

/// Writes "i,j,weight" rows with a header.
void write_edges_csv(const WeightGraph& g, std::ostream& out);

} // namespace kcc
