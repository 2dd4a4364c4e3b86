#include "kcc/metrics.hpp"

#include "kcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace kcc {

namespace {

std::vector<int> dense_ids(std::span<const int> labels, int& count) {
    std::unordered_map<int, int> ids;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = ids.try_emplace(l, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    count = static_cast<int>(ids.size());
    return out;
}

double entropy(const Eigen::VectorXd& sums, double total) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < sums.size(); ++i)
        if (sums[i] > 0.0) {
            const double p = sums[i] / total;
            h -= p * std::log(p);
        }
    return h;
}

double comb2(double x) { return 0.5 * x * (x - 1.0); }

} // namespace

ContingencyTable ContingencyTable::from_labels(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw InvalidInput("label vectors differ in length");
    int r = 0;
    int c = 0;
    const auto u = dense_ids(truth, r);
    const auto v = dense_ids(pred, c);
    ContingencyTable t;
    t.counts = Eigen::MatrixXd::Zero(r, c);
    for (std::size_t i = 0; i < u.size(); ++i) t.counts(u[i], v[i]) += 1.0;
    t.row_sums = t.counts.rowwise().sum();
    t.col_sums = t.counts.colwise().sum().transpose();
    t.total = static_cast<double>(truth.size());
    return t;
}

double nmi(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw InvalidInput("label vectors differ in length");
    if (truth.empty()) throw InvalidInput("nmi needs at least one label");
    const auto t = ContingencyTable::from_labels(truth, pred);
    const double hu = entropy(t.row_sums, t.total);
    const double hv = entropy(t.col_sums, t.total);
    if (hu == 0.0 && hv == 0.0) return 1.0;

    double mi = 0.0;
    for (Eigen::Index a = 0; a < t.counts.rows(); ++a)
        for (Eigen::Index b = 0; b < t.counts.cols(); ++b) {
            const double nab = t.counts(a, b);
            if (nab > 0.0) mi += nab / t.total * std::log(nab * t.total / (t.row_sums[a] * t.col_sums[b]));
        }
    const double value = mi / (0.5 * (hu + hv));
    return std::clamp(value, 0.0, 1.0);
}

double ari(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw InvalidInput("label vectors differ in length");
    if (truth.size() < 2) throw InvalidInput("ari needs at least two labels");
    const auto t = ContingencyTable::from_labels(truth, pred);
    double index = 0.0;
    for (Eigen::Index a = 0; a < t.counts.rows(); ++a)
        for (Eigen::Index b = 0; b < t.counts.cols(); ++b) index += comb2(t.counts(a, b));
    double sum_rows = 0.0;
    double sum_cols = 0.0;
    for (Eigen::Index a = 0; a < t.row_sums.size(); ++a) sum_rows += comb2(t.row_sums[a]);
    for (Eigen::Index b = 0; b < t.col_sums.size(); ++b) sum_cols += comb2(t.col_sums[b]);
    const double expected = sum_rows * sum_cols / comb2(t.total);
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double numerator = index - expected;
    const double denominator = max_index - expected;
    if (denominator == 0.0) return numerator == 0.0 ? 1.0 : 0.0;
    return numerator / denominator;
}

} // namespace kcc
