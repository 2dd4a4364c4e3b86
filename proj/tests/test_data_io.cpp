#include "kcc/data_io.hpp"
#include "kcc/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace kcc;

namespace {

Dataset parse(const std::string& text, bool header, std::optional<LabelColumn> label = std::nullopt) {
    std::istringstream in(text);
    return parse_csv(in, header, label);
}

} // namespace

TEST_SUITE("data_io") {

TEST_CASE("generator class sizes") {
    for (int blobs = 1; blobs <= 7; ++blobs) {
        const Dataset d = gen_rings_blobs(blobs, 3);
        CHECK(d.n() == 200 + 50 * blobs);
        CHECK(d.d() == 2);
        std::map<int, int> counts;
        for (int l : *d.labels) ++counts[l];
        CHECK(counts[0] == 200);
        for (int b = 1; b <= blobs; ++b) CHECK(counts[b] == 50);
        CHECK(counts.size() == static_cast<std::size_t>(blobs + 1));
    }
    CHECK_THROWS_AS(gen_rings_blobs(0, 1), InvalidInput);
    CHECK_THROWS_AS(gen_rings_blobs(8, 1), InvalidInput);
}

TEST_CASE("generator geometry over 100 seeds") {
    double min_r = 1e9, max_r = 0.0;
    double worst_blob = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Dataset d = gen_rings_blobs(4, seed);
        for (int i = 0; i < d.n(); ++i) {
            const int label = (*d.labels)[i];
            if (label == 0) {
                const double r = d.X.row(i).norm();
                min_r = std::min(min_r, r);
                max_r = std::max(max_r, r);
            } else {
                const double angle = 2.0 * M_PI * (label - 1) / 4.0;
                const Eigen::RowVector2d centre(1.5 * std::cos(angle), 1.5 * std::sin(angle));
                worst_blob = std::max(worst_blob, (d.X.row(i) - centre).norm());
            }
        }
    }
    CHECK(min_r >= 2.0);
    CHECK(max_r <= 4.0);
    CHECK(worst_blob <= 0.45);

    const Dataset one = gen_rings_blobs(1, 5);
    for (int i = 200; i < 250; ++i) CHECK(one.X.row(i).norm() <= 0.45);
}

TEST_CASE("generator is deterministic in the seed") {
    const Dataset a = gen_rings_blobs(3, 77), b = gen_rings_blobs(3, 77), c = gen_rings_blobs(3, 78);
    CHECK(a.X == b.X);
    CHECK(*a.labels == *b.labels);
    CHECK(a.X != c.X);
}

TEST_CASE("plain numeric csv") {
    const Dataset d = parse("1,2\n3,4\n5,6\n", false);
    CHECK(d.n() == 3);
    CHECK(d.d() == 2);
    CHECK(d.X(2, 1) == 6.0);
    CHECK_FALSE(d.labels.has_value());
}

TEST_CASE("header and trailing label column") {
    const Dataset d = parse("a,b,y\n0.5,1,cat\n2,-3e2,dog\n7,8,cat\n", true, LabelColumn{std::string("y")});
    CHECK(d.d() == 2);
    CHECK(d.X(1, 1) == -300.0);
    CHECK(*d.labels == std::vector<int>{0, 1, 0});
    CHECK(d.label_names == std::vector<std::string>{"cat", "dog"});

    const Dataset e = parse("a,b,y\n0.5,1,cat\n2,-3e2,dog\n", true, LabelColumn{-1L});
    CHECK(*e.labels == std::vector<int>{0, 1});
    const Dataset f = parse("y,a\n4,1\n4,2\n", true, LabelColumn{0L});
    CHECK(f.d() == 1);
    CHECK(*f.labels == std::vector<int>{0, 0});
}

TEST_CASE("parse errors carry row and column") {
    try {
        parse("a,b\n1,2\n3,abc\n", true);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
    }
    try {
        parse("1,2\n3\n", false);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(parse("", false), ParseError);
    CHECK_THROWS_AS(parse("a,b\n", true), ParseError);
    CHECK_THROWS_AS(parse("a,b\n1,2\n", true, LabelColumn{std::string("zzz")}), InvalidInput);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", true), InvalidInput);
}

TEST_CASE("load_csv reads from disk") {
    const auto path = std::filesystem::temp_directory_path() / "kcc_test_load.csv";
    {
        std::ofstream out(path);
        out << "x,y,label\n1,2,0\n3,4,1\n";
    }
    const Dataset d = load_csv(path, true, LabelColumn{std::string("label")});
    CHECK(d.n() == 2);
    CHECK(*d.labels == std::vector<int>{0, 1});
    CHECK(d.provenance.find("kcc_test_load.csv") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("standardize") {
    Dataset d;
    d.X.resize(2, 2);
    d.X << 0, 5, 2, 5;
    const Dataset s = standardize(d);
    CHECK(s.X(0, 0) == -1.0);
    CHECK(s.X(1, 0) == 1.0);
    CHECK(s.X(0, 1) == 0.0);
    CHECK(s.X(1, 1) == 0.0);

    const Dataset g = gen_rings_blobs(2, 4);
    const Dataset once = standardize(g);
    const Dataset twice = standardize(once);
    CHECK((once.X - twice.X).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(once.X.col(0).mean()) <= 1e-12);
    CHECK(*once.labels == *g.labels);

    Dataset tiny;
    tiny.X = Eigen::MatrixXd::Ones(1, 3);
    CHECK_THROWS_AS(standardize(tiny), InvalidInput);
}

TEST_CASE("csv writers") {
    std::ostringstream m;
    Eigen::MatrixXd x(2, 2);
    x << 1, 0.5, -2, 3;
    write_matrix_csv(x, m, {"a", "b"});
    CHECK(m.str() == "a,b\n1,0.5\n-2,3\n");
    std::ostringstream l;
    write_labels_csv({2, 0}, l);
    CHECK(l.str() == "point,label\n0,2\n1,0\n");
}

} // TEST_SUITE
