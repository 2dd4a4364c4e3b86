#include "kcc/weight_graph.hpp"

#include "kcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace kcc {

double WeightGraph::min_weight() const {
    if (edges.empty()) return 0.0;
    return std::min_element(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
               return a.weight < b.weight;
           })->weight;
}

Eigen::MatrixXd WeightGraph::dense() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        w(e.i, e.j) = e.weight;
        w(e.j, e.i) = e.weight;
    }
    return w;
}

WeightGraph knn_gaussian_weights(const Eigen::MatrixXd& data, int knn, double sigma2) {
    const auto n = static_cast<int>(data.rows());
    if (n < 2) throw InvalidInput("weight graph needs at least two points");
    if (knn < 1 || knn >= n) throw InvalidInput("knn must satisfy 1 <= knn <= n-1");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidInput("sigma2 must be positive");
    if (!data.allFinite()) throw InvalidInput("data contains non-finite entries");

    const Eigen::MatrixXd points = data.transpose();
    Eigen::MatrixXd sq(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sq(i, j) = (points.col(i) - points.col(j)).squaredNorm();

    // Directed raw weights, row i holds the neighbours of point i.
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> order(static_cast<std::size_t>(n - 1));
    const double denom = 2.0 * sigma2 * sigma2;
    for (int i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) order[k++] = j;
        std::partial_sort(order.begin(), order.begin() + knn, order.end(), [&](int a, int b) {
            if (sq(i, a) != sq(i, b)) return sq(i, a) < sq(i, b);
            return a < b;
        });
        for (int t = 0; t < knn; ++t) {
            const int j = order[static_cast<std::size_t>(t)];
            raw(i, j) = std::exp(-sq(i, j) / denom);
        }
    }

    WeightGraph g;
    g.n = n;
    g.knn = knn;
    g.sigma2 = sigma2;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double w = 0.5 * (raw(i, j) + raw(j, i));
            if (w > 0.0) g.edges.push_back({i, j, w});
        }
    return g;
}

WeightGraph complete_graph(int n, double weight) {
    if (n < 1) throw InvalidInput("graph needs at least one point");
    if (!(weight > 0.0)) throw InvalidInput("edge weights must be positive");
    WeightGraph g;
    g.n = n;
    g.knn = n - 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j, weight});
    return g;
}

WeightGraph graph_from_edges(int n, std::vector<Edge> edges) {
    if (n < 1) throw InvalidInput("graph needs at least one point");
    for (auto& e : edges) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n || e.i == e.j) throw InvalidInput("edge endpoints out of range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw InvalidInput("edge weights must be positive and finite");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < edges.size(); ++k)
        if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j)
            throw InvalidInput("duplicate edge");
    WeightGraph g;
    g.n = n;
    g.edges = std::move(edges);
    return g;
}

std::vector<int> components(const WeightGraph& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : g.edges) {
        const int a = find(e.i);
        const int b = find(e.j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> label(static_cast<std::size_t>(g.n), -1);
    std::vector<int> root_label(static_cast<std::size_t>(g.n), -1);
    int next = 0;
    for (int i = 0; i < g.n; ++i) {
        const int r = find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        label[i] = root_label[r];
    }
    return label;
}

void write_edges_csv(const WeightGraph& g, std::ostream& out) {
    out << "i,j,weight\n" << std::setprecision(17);
    for (const auto& e : g.edges) out << e.i << ',' << e.j << ',' << e.weight << '\n';
}

} // namespace kcc
