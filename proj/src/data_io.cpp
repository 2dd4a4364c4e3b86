#include "kcc/data_io.hpp"

#include "kcc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

namespace kcc {

Dataset gen_rings_blobs(int n_blobs, std::uint64_t seed) {
    if (n_blobs < 1 || n_blobs > 7) throw InvalidInput("n_blobs must lie in [1, 7]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius(0.0, kBlobRadius);
    std::normal_distribution<double> noise(0.0, kCircleNoiseSd);

    const int n = kCirclePoints + n_blobs * kBlobPoints;
    Dataset out;
    out.X.resize(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    int row = 0;
    for (int i = 0; i < kCirclePoints; ++i, ++row) {
        const double theta = angle(rng);
        const double ex = noise(rng);
        const double ey = noise(rng);
        out.X(row, 0) = kCircleRadius * std::cos(theta) + ex;
        out.X(row, 1) = kCircleRadius * std::sin(theta) + ey;
        labels[row] = 0;
    }
    for (int b = 0; b < n_blobs; ++b) {
        double cx = 0.0;
        double cy = 0.0;
        if (n_blobs > 1) {
            const double phi = 2.0 * std::numbers::pi * b / n_blobs;
            cx = kBlobRingRadius * std::cos(phi);
            cy = kBlobRingRadius * std::sin(phi);
        }
        for (int i = 0; i < kBlobPoints; ++i, ++row) {
            const double theta = angle(rng);
            const double r = radius(rng);
            out.X(row, 0) = cx + r * std::cos(theta);
            out.X(row, 1) = cy + r * std::sin(theta);
            labels[row] = b + 1;
        }
    }
    out.labels = std::move(labels);
    out.provenance = "rings_blobs(n_blobs=" + std::to_string(n_blobs) + ", seed=" + std::to_string(seed) + ")";
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    std::string out(s.substr(b, e - b + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

bool parse_double(const std::string& cell, double& value) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

} // namespace

Dataset parse_csv(std::istream& in, bool has_header, const std::optional<LabelColumn>& label_column,
                  const std::string& provenance) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (has_header && header.empty() && rows.empty()) {
            header = split(line);
            continue;
        }
        rows.push_back(split(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw ParseError(std::max<std::size_t>(line_no, 1), 1, "no data rows");

    const std::size_t width = rows.front().size();
    if (!header.empty() && header.size() != width)
        throw ParseError(line_numbers.front(), width, "row width differs from header width " + std::to_string(header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw ParseError(line_numbers[r], std::min(rows[r].size(), width) + 1,
                             "expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(rows[r].size()));

    std::optional<std::size_t> label_idx;
    if (label_column) {
        if (const long* idx = std::get_if<long>(&*label_column)) {
            const long w = static_cast<long>(width);
            const long resolved = *idx < 0 ? w + *idx : *idx;
            if (resolved < 0 || resolved >= w) throw InvalidInput("label column index out of range");
            label_idx = static_cast<std::size_t>(resolved);
        } else {
            const auto& name = std::get<std::string>(*label_column);
            for (std::size_t c = 0; c < header.size(); ++c)
                if (header[c] == name) label_idx = c;
            if (!label_idx) throw InvalidInput("label column '" + name + "' not found in header");
        }
    }

    const std::size_t features = width - (label_idx ? 1 : 0);
    if (features == 0) throw ParseError(line_numbers.front(), 1, "no feature columns");

    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features));
    std::vector<int> labels;
    std::unordered_map<std::string, int> label_ids;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Eigen::Index f = 0;
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& cell = rows[r][c];
            if (label_idx && c == *label_idx) {
                auto [it, inserted] = label_ids.try_emplace(cell, static_cast<int>(label_ids.size()));
                if (inserted) out.label_names.push_back(cell);
                labels.push_back(it->second);
                continue;
            }
            double v = 0.0;
            if (!parse_double(cell, v))
                throw ParseError(line_numbers[r], c + 1, "non-numeric value '" + cell + "'");
            out.X(static_cast<Eigen::Index>(r), f++) = v;
        }
    }
    if (label_idx) out.labels = std::move(labels);
    out.provenance = provenance;
    return out;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header, const std::optional<LabelColumn>& label_column) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    return parse_csv(in, has_header, label_column, path.string());
}

Dataset standardize(const Dataset& d) {
    if (d.n() < 2) throw InvalidInput("standardize needs at least two rows");
    Dataset out = d;
    for (Eigen::Index c = 0; c < d.X.cols(); ++c) {
        auto col = out.X.col(c);
        if ((col.array() == col(0)).all()) {
            col.setZero();
            continue;
        }
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(d.n()));
        if (sd > 0.0) col /= sd;
    }
    return out;
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out, const std::vector<std::string>& header) {
    out << std::setprecision(17);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    if (!header.empty()) out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
        out << '\n';
    }
}

void write_labels_csv(const std::vector<int>& labels, std::ostream& out) {
    out << "point,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

} // namespace kcc
