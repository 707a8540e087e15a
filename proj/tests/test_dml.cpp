#include <algorithm>
#include <random>
#include <set>

#include "distspec/dml.hpp"
#include "doctest.h"

using namespace distspec;

namespace {

Matrix column(std::initializer_list<double> xs) {
    Matrix m(static_cast<Index>(xs.size()), 1);
    Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

Matrix random_points(int n, int d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    return m;
}

double ssw_of(const Matrix& points, const Grouping& g) {
    double s = 0.0;
    for (Index i = 0; i < points.rows(); ++i)
        s += (points.row(i) - g.centroids.row(g.assignment[static_cast<size_t>(i)]))
                 .squaredNorm();
    return s;
}

void check_grouping_invariants(const Matrix& points, const Grouping& g) {
    const Index n = points.rows();
    REQUIRE(static_cast<Index>(g.assignment.size()) == n);
    std::int64_t total = 0;
    for (auto s : g.sizes) {
        CHECK(s > 0);
        total += s;
    }
    CHECK(total == n);
    const int k = g.group_count();
    std::vector<std::int64_t> counted(static_cast<size_t>(k), 0);
    Matrix sums = Matrix::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) {
        const int a = g.assignment[static_cast<size_t>(i)];
        REQUIRE(a >= 0);
        REQUIRE(a < k);
        ++counted[static_cast<size_t>(a)];
        sums.row(a) += points.row(i);
    }
    for (int c = 0; c < k; ++c) {
        CHECK(counted[static_cast<size_t>(c)] == g.sizes[static_cast<size_t>(c)]);
        Vector mean = sums.row(c).transpose() /
                      static_cast<double>(g.sizes[static_cast<size_t>(c)]);
        CHECK((g.centroids.row(c).transpose() - mean).norm() <= 1e-9);
    }
}

}  // namespace

TEST_SUITE("dml") {

TEST_CASE("kmeans on the two-pair line") {
    auto pts = column({0, 1, 10, 11});
    auto g = kmeans(pts, 2, 100, 3);
    std::vector<double> cents = {g.centroids(0, 0), g.centroids(1, 0)};
    std::sort(cents.begin(), cents.end());
    CHECK(cents[0] == doctest::Approx(0.5));
    CHECK(cents[1] == doctest::Approx(10.5));
    CHECK(ssw_of(pts, g) == doctest::Approx(1.0));
}

TEST_CASE("kmeans with one cluster returns the mean") {
    auto pts = random_points(20, 3, 5);
    auto g = kmeans(pts, 1, 100, 1);
    Vector mean = pts.colwise().mean().transpose();
    CHECK((g.centroids.row(0).transpose() - mean).norm() <= 1e-9);
    double expect = 0.0;
    for (Index i = 0; i < 20; ++i)
        expect += (pts.row(i).transpose() - mean).squaredNorm();
    CHECK(ssw_of(pts, g) == doctest::Approx(expect));
}

TEST_CASE("kmeans needs enough distinct points") {
    Matrix pts = Matrix::Zero(6, 2);
    CHECK_THROWS_AS(kmeans(pts, 2, 100, 1), std::runtime_error);
    CHECK_THROWS_AS(kmeans(pts, 0, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(pts, 7, 100, 1), std::invalid_argument);
}

TEST_CASE("kmeans SSW history is non-increasing") {
    for (unsigned seed : {1u, 7u, 42u}) {
        auto pts = random_points(200, 2, seed);
        std::vector<double> history;
        auto g = kmeans(pts, 8, 100, seed, &history);
        REQUIRE(!history.empty());
        for (size_t i = 1; i < history.size(); ++i)
            CHECK(history[i] <= history[i - 1] + 1e-9);
        CHECK(ssw_of(pts, g) <= history.front() + 1e-9);
    }
}

TEST_CASE("kmeans converged assignment is a fixed point") {
    auto pts = random_points(120, 3, 9);
    auto g = kmeans(pts, 5, 200, 9);
    for (Index i = 0; i < pts.rows(); ++i) {
        int best = 0;
        double best_d = (pts.row(i) - g.centroids.row(0)).squaredNorm();
        for (int c = 1; c < 5; ++c) {
            const double d = (pts.row(i) - g.centroids.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        CHECK(g.assignment[static_cast<size_t>(i)] == best);
    }
}

TEST_CASE("kmeans grouping invariants and determinism") {
    auto pts = random_points(150, 4, 12);
    auto g = kmeans(pts, 10, 100, 99);
    check_grouping_invariants(pts, g);
    auto again = kmeans(pts, 10, 100, 99);
    CHECK(g.assignment == again.assignment);
    CHECK(g.centroids == again.centroids);
}

TEST_CASE("rptree below threshold is one leaf") {
    auto pts = random_points(4, 2, 2);
    auto g = rptree_partition(pts, 5, 1);
    CHECK(g.group_count() == 1);
    CHECK(g.sizes[0] == 4);
    CHECK(g.oversized[0] == 0);
}

TEST_CASE("rptree leaf bound and partition over seeds") {
    auto pts = random_points(1000, 2, 3);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        auto g = rptree_partition(pts, 40, seed);
        check_grouping_invariants(pts, g);
        for (size_t c = 0; c < g.sizes.size(); ++c)
            if (!g.oversized[c]) CHECK(g.sizes[c] < 40);
    }
}

TEST_CASE("rptree is bit-reproducible for a fixed seed") {
    auto pts = random_points(500, 3, 8);
    auto a = rptree_partition(pts, 20, 77);
    auto b = rptree_partition(pts, 20, 77);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("rptree flags unsplittable duplicates") {
    Matrix pts = Matrix::Ones(100, 2);
    auto g = rptree_partition(pts, 10, 4);
    CHECK(g.group_count() == 1);
    CHECK(g.sizes[0] == 100);
    CHECK(g.oversized[0] == 1);
}

TEST_CASE("rptree validates the split threshold") {
    auto pts = random_points(10, 2, 1);
    CHECK_THROWS_AS(rptree_partition(pts, 1, 1), std::invalid_argument);
}

TEST_CASE("compress derives the codeword count from the ratio") {
    auto pts = random_points(40000, 2, 6);
    DmlConfig cfg;
    cfg.compression_ratio = 40.0;
    cfg.max_iter = 2;  // counting groups, not converging
    cfg.seed = 1;
    auto g = compress(pts, cfg);
    CHECK(g.group_count() == 1000);
}

TEST_CASE("compress at ratio 1 is lossless on distinct points") {
    auto pts = random_points(12, 2, 10);
    DmlConfig cfg;
    cfg.compression_ratio = 1.0;
    cfg.seed = 2;
    auto g = compress(pts, cfg);
    CHECK(g.group_count() == 12);
    CHECK(ssw_of(pts, g) == doctest::Approx(0.0));
}

TEST_CASE("compress clamps tiny datasets to one codeword") {
    auto pts = random_points(10, 2, 11);
    DmlConfig cfg;
    cfg.compression_ratio = 1000.0;
    cfg.seed = 3;
    auto g = compress(pts, cfg);
    CHECK(g.group_count() == 1);
    Vector mean = pts.colwise().mean().transpose();
    CHECK((g.centroids.row(0).transpose() - mean).norm() <= 1e-9);
}

TEST_CASE("compress dispatches the ratio to the rptree leaf bound") {
    auto pts = random_points(400, 2, 14);
    DmlConfig cfg;
    cfg.method = DmlMethod::rptree;
    cfg.compression_ratio = 40.0;
    cfg.seed = 5;
    auto g = compress(pts, cfg);
    for (size_t c = 0; c < g.sizes.size(); ++c)
        if (!g.oversized[c]) CHECK(g.sizes[c] < 40);
    DmlConfig bad = cfg;
    bad.compression_ratio = 1.0;  // derived leaf bound 1 is rejected
    CHECK_THROWS_AS(compress(pts, bad), std::invalid_argument);
    bad.compression_ratio = 0.5;
    CHECK_THROWS_AS(compress(pts, bad), std::invalid_argument);
}

TEST_CASE("distortion is non-increasing in codeword count on average") {
    auto pts = random_points(600, 2, 20);
    double prev = std::numeric_limits<double>::infinity();
    for (int k : {4, 16, 64}) {
        double total = 0.0;
        for (unsigned seed = 1; seed <= 5; ++seed)
            total += ssw_of(pts, kmeans(pts, k, 100, seed));
        CHECK(total < prev);
        prev = total;
    }
}

}  // TEST_SUITE
