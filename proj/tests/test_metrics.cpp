#include "kcc/error.hpp"
#include "kcc/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace kcc;

namespace {

std::vector<int> relabel(const std::vector<int>& v, const std::vector<int>& perm) {
    std::vector<int> out;
    for (int x : v) out.push_back(perm[static_cast<std::size_t>(x)]);
    return out;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("contingency table") {
    const std::vector<int> a{0, 0, 1, 1, 2}, b{1, 1, 0, 1, 0};
    const ContingencyTable t = ContingencyTable::from_labels(a, b);
    CHECK(t.total == 5);
    CHECK(t.counts.rows() == 3);
    CHECK(t.counts.cols() == 2);
    CHECK(t.counts.sum() == 5);
    CHECK(t.row_sums.sum() == 5);
    CHECK(t.col_sums.sum() == 5);
}

TEST_CASE("nmi examples") {
    const std::vector<int> t{0, 0, 1, 1, 2, 2};
    CHECK(nmi(t, t) == doctest::Approx(1.0));
    CHECK(nmi(t, std::vector<int>{5, 5, 3, 3, 9, 9}) == doctest::Approx(1.0));
    CHECK(nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(0.0));
    CHECK(nmi(std::vector<int>{4, 4, 4}, std::vector<int>{1, 1, 1}) == 1.0);
    CHECK(nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(nmi(std::vector<int>{0, 1}, std::vector<int>{0}), InvalidInput);
    CHECK_THROWS_AS(nmi(std::vector<int>{}, std::vector<int>{}), InvalidInput);
}

TEST_CASE("ari examples") {
    const std::vector<int> t{0, 0, 1, 1};
    CHECK(ari(t, t) == 1.0);
    CHECK(ari(t, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(-0.5));
    CHECK(ari(t, std::vector<int>{7, 7, 7, 7}) == doctest::Approx(0.0));
    CHECK(ari(std::vector<int>{2, 2, 2}, std::vector<int>{0, 0, 0}) == 1.0);
    CHECK_THROWS_AS(ari(std::vector<int>{0}, std::vector<int>{0}), InvalidInput);
    CHECK_THROWS_AS(ari(std::vector<int>{0, 1}, std::vector<int>{0, 1, 1}), InvalidInput);
}

TEST_CASE("metrics agree with brute-force oracles on small random labelings") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1500; ++trial) {
        const int n = 2 + trial % 7;
        std::uniform_int_distribution<int> pick(0, 1 + trial % 4);
        std::vector<int> a(static_cast<std::size_t>(n)), b(a);
        for (int i = 0; i < n; ++i) {
            a[i] = pick(rng);
            b[i] = pick(rng);
        }
        CHECK(ari(a, b) == oracle::ari(a, b));
        CHECK(std::abs(nmi(a, b) - oracle::nmi(a, b)) <= 1e-12);
        CHECK(ari(a, b) == ari(b, a));
        CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)).epsilon(1e-14));
    }
}

TEST_CASE("relabeling invariance") {
    std::mt19937_64 rng(7);
    std::vector<int> perm{0, 1, 2, 3, 4};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> a(20), b(20);
        std::uniform_int_distribution<int> pick(0, 4);
        for (int i = 0; i < 20; ++i) {
            a[i] = pick(rng);
            b[i] = pick(rng);
        }
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(ari(a, relabel(b, perm)) == doctest::Approx(ari(a, b)).epsilon(1e-13));
        CHECK(nmi(relabel(a, perm), b) == doctest::Approx(nmi(a, b)).epsilon(1e-13));
    }
}

} // TEST_SUITE
