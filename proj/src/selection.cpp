#include "kcc/selection.hpp"

#include "kcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace kcc {

std::string to_string(Linkage linkage) {
    switch (linkage) {
    case Linkage::average: return "average";
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::ward: return "ward";
    }
    return "unknown";
}

Linkage linkage_from_string(const std::string& name) {
    if (name == "average") return Linkage::average;
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "ward") return Linkage::ward;
    throw InvalidInput("unknown linkage '" + name + "'");
}

std::string to_string(SelectionMode mode) {
    return mode == SelectionMode::auto_elbow ? "auto-elbow" : "manual";
}

Dendrogram agglomerate(const Eigen::MatrixXd& centroids, Linkage linkage) {
    const auto n = static_cast<int>(centroids.cols());
    if (n < 2) throw InvalidInput("agglomeration needs at least two centroids");

    Eigen::MatrixXd dist(n, n);
    for (int j = 0; j < n; ++j) {
        dist(j, j) = 0.0;
        for (int i = 0; i < j; ++i) {
            const double d = (centroids.col(i) - centroids.col(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    std::vector<int> id(static_cast<std::size_t>(n));
    std::vector<int> size(static_cast<std::size_t>(n), 1);
    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::iota(id.begin(), id.end(), 0);

    Dendrogram out;
    out.n = n;
    out.merges.reserve(static_cast<std::size_t>(n - 1));
    double last_height = 0.0;
    for (int step = 0; step < n - 1; ++step) {
        int best_a = -1;
        int best_b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (int b = a + 1; b < n; ++b) {
                if (active[b] && dist(a, b) < best) {
                    best = dist(a, b);
                    best_a = a;
                    best_b = b;
                }
            }
        }
        // All four linkages are monotone; clamp away rounding-level inversions.
        last_height = std::max(last_height, best);
        const int merged_size = size[best_a] + size[best_b];
        out.merges.push_back({id[best_a], id[best_b], last_height, merged_size});

        for (int k = 0; k < n; ++k) {
            if (!active[k] || k == best_a || k == best_b) continue;
            double d = 0.0;
            switch (linkage) {
            case Linkage::average:
                d = (size[best_a] * dist(k, best_a) + size[best_b] * dist(k, best_b)) / merged_size;
                break;
            case Linkage::single: d = std::min(dist(k, best_a), dist(k, best_b)); break;
            case Linkage::complete: d = std::max(dist(k, best_a), dist(k, best_b)); break;
            case Linkage::ward: {
                // Lance-Williams on squared distances; heights stay in distance units
                const double nk = size[k], na = size[best_a], nb = size[best_b];
                const double sq = ((nk + na) * dist(k, best_a) * dist(k, best_a) +
                                   (nk + nb) * dist(k, best_b) * dist(k, best_b) - nk * best * best) /
                                  (nk + na + nb);
                d = std::sqrt(std::max(0.0, sq));
                break;
            }
            }
            dist(k, best_a) = d;
            dist(best_a, k) = d;
        }
        active[best_b] = 0;
        size[best_a] = merged_size;
        id[best_a] = n + step;
    }
    return out;
}

std::vector<int> cut(const Dendrogram& d, int k) {
    if (k < 1 || k > d.n) throw InvalidInput("cut: k must lie in [1, n]");
    std::vector<int> parent(static_cast<std::size_t>(d.n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    // representative leaf of every cluster id
    std::vector<int> leaf(static_cast<std::size_t>(2 * d.n - 1));
    std::iota(leaf.begin(), leaf.begin() + d.n, 0);
    for (int t = 0; t < d.n - k; ++t) {
        const Merge& m = d.merges[static_cast<std::size_t>(t)];
        const int ra = find(leaf[m.a]);
        const int rb = find(leaf[m.b]);
        parent[std::max(ra, rb)] = std::min(ra, rb);
        leaf[static_cast<std::size_t>(d.n + t)] = std::min(ra, rb);
    }
    std::vector<int> labels(static_cast<std::size_t>(d.n));
    std::vector<int> root_label(static_cast<std::size_t>(d.n), -1);
    int next = 0;
    for (int i = 0; i < d.n; ++i) {
        const int r = find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        labels[i] = root_label[r];
    }
    return labels;
}

double within_cluster_sse(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != points.cols())
        throw InvalidInput("label count does not match point count");
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) throw InvalidInput("labels must be non-negative");
        sums.col(labels[i]) += points.col(static_cast<Eigen::Index>(i));
        ++counts[labels[i]];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = labels[i];
        sse += (points.col(static_cast<Eigen::Index>(i)) - sums.col(c) / counts[c]).squaredNorm();
    }
    return sse;
}

SseCurve sse_curve(const Eigen::MatrixXd& centroids, const Dendrogram& d, int k_max) {
    if (k_max < 1 || k_max > d.n) throw InvalidInput("k_max must lie in [1, n]");
    if (centroids.cols() != d.n) throw InvalidInput("dendrogram does not match centroids");
    SseCurve curve;
    curve.values.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) curve.values.push_back(within_cluster_sse(centroids, cut(d, k)));
    return curve;
}

int elbow(const SseCurve& curve) {
    const int k_max = curve.k_max();
    if (k_max < 3) throw InvalidInput("elbow needs an SSE curve with k_max >= 3");
    const double sse1 = curve.values.front();
    if (!(sse1 > 0.0)) return 1;

    auto drop = [&](int k) { return (curve.at(k - 1) - curve.at(k)) / sse1; };
    constexpr double tie = 1e-12;
    int best_k = 2;
    double best = drop(2) - drop(3);
    for (int k = 3; k <= k_max - 1; ++k) {
        const double score = drop(k) - drop(k + 1);
        if (score > best + tie) {
            best = score;
            best_k = k;
        }
    }
    return best_k;
}

ClusterSelection select_clusters(const Eigen::MatrixXd& centroids, std::optional<int> k_max,
                                 std::optional<int> manual_k, Linkage linkage) {
    const auto n = static_cast<int>(centroids.cols());
    ClusterSelection sel;
    sel.dendrogram = agglomerate(centroids, linkage);
    const int kmax = k_max.value_or(default_k_max(n));
    sel.sse = sse_curve(centroids, sel.dendrogram, kmax);
    if (manual_k) {
        if (*manual_k < 1 || *manual_k > n) throw InvalidInput("manual k must lie in [1, n]");
        sel.chosen_k = *manual_k;
        sel.mode = SelectionMode::manual;
    } else {
        sel.chosen_k = elbow(sel.sse);
        sel.mode = SelectionMode::auto_elbow;
    }
    sel.labels = cut(sel.dendrogram, sel.chosen_k);
    return sel;
}

void write_sse_csv(const SseCurve& curve, std::ostream& out) {
    out << "k,sse\n" << std::setprecision(17);
    for (int k = 1; k <= curve.k_max(); ++k) out << k << ',' << curve.at(k) << '\n';
}

void write_dendrogram_csv(const Dendrogram& d, std::ostream& out) {
    out << "step,cluster_a,cluster_b,height,size\n" << std::setprecision(17);
    for (std::size_t t = 0; t < d.merges.size(); ++t) {
        const Merge& m = d.merges[t];
        out << t << ',' << m.a << ',' << m.b << ',' << m.height << ',' << m.size << '\n';
    }
}

} // namespace kcc
