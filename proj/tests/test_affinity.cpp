#include <cmath>
#include <random>

#include "distspec/affinity.hpp"
#include "doctest.h"

using namespace distspec;

namespace {

Matrix two_points(double x0, double y0, double x1, double y1) {
    Matrix m(2, 2);
    m << x0, y0, x1, y1;
    return m;
}

AffinityMatrix from_entries(Matrix entries) {
    AffinityMatrix a;
    a.entries = std::move(entries);
    a.bandwidth = 1.0;
    return a;
}

Matrix random_points(int n, int d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    return m;
}

}  // namespace

TEST_SUITE("affinity") {

TEST_CASE("kernel of coincident points is 1") {
    auto a = gaussian_affinity(two_points(0, 0, 0, 0), 1.0);
    CHECK(a.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kernel at unit distance, unit bandwidth") {
    auto a = gaussian_affinity(two_points(0, 0, 1, 0), 1.0);
    CHECK(a.entries(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
    CHECK(a.entries(0, 1) == doctest::Approx(0.60653).epsilon(1e-4));
}

TEST_CASE("diagonal is zero") {
    auto a = gaussian_affinity(random_points(12, 3, 7), 0.8);
    for (Index i = 0; i < a.size(); ++i) CHECK(a.entries(i, i) == 0.0);
}

TEST_CASE("affinity symmetry and range") {
    for (unsigned seed : {1u, 2u, 3u}) {
        auto a = gaussian_affinity(random_points(20, 4, seed), 1.3);
        for (Index i = 0; i < a.size(); ++i)
            for (Index j = 0; j < a.size(); ++j) {
                CHECK(a.entries(i, j) == a.entries(j, i));
                CHECK(a.entries(i, j) >= 0.0);
                CHECK(a.entries(i, j) <= 1.0);
            }
    }
}

TEST_CASE("affinity input validation") {
    CHECK_THROWS_AS(gaussian_affinity(Matrix(0, 2), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(gaussian_affinity(two_points(0, 0, 1, 0), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(gaussian_affinity(two_points(0, 0, 1, 0), -2.0),
                    std::invalid_argument);
}

TEST_CASE("laplacian of the two-vertex unit graph") {
    Matrix entries(2, 2);
    entries << 0, 1, 1, 0;
    auto lap = build_laplacian(from_entries(entries));
    CHECK(lap.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(lap.matrix(0, 1) == doctest::Approx(-1.0));
    CHECK(lap.matrix(1, 0) == doctest::Approx(-1.0));
    CHECK(lap.matrix(1, 1) == doctest::Approx(1.0));
    CHECK(lap.degrees[0] == doctest::Approx(1.0));
}

TEST_CASE("isolated vertex is rejected") {
    Matrix entries = Matrix::Zero(3, 3);
    entries(0, 1) = entries(1, 0) = 0.5;
    CHECK_THROWS_AS(build_laplacian(from_entries(entries)),
                    std::runtime_error);
}

TEST_CASE("laplacian spectrum and null vector") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Matrix entries = Matrix::Zero(5, 5);
    for (Index i = 0; i < 5; ++i)
        for (Index j = i + 1; j < 5; ++j)
            entries(i, j) = entries(j, i) = u(rng);
    auto lap = build_laplacian(from_entries(entries));

    Eigen::SelfAdjointEigenSolver<Matrix> es(lap.matrix);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-8);

    Vector null_vec = lap.degrees.array().sqrt();
    CHECK((lap.matrix * null_vec).norm() == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("cut weight basics") {
    Matrix entries(2, 2);
    entries << 0, 1, 1, 0;
    auto a = from_entries(entries);
    std::vector<int> v0 = {0}, v1 = {1}, none;
    CHECK(cut_weight(none, v1, a) == 0.0);
    CHECK(cut_weight(v0, v1, a) == doctest::Approx(1.0));
}

TEST_CASE("cut weight of the full graph is the total entry sum") {
    auto a = gaussian_affinity(random_points(9, 2, 4), 1.0);
    std::vector<int> all;
    for (Index i = 0; i < a.size(); ++i) all.push_back(static_cast<int>(i));
    double expect = 0.0;
    for (Index i = 0; i < a.size(); ++i)
        for (Index j = 0; j < a.size(); ++j) expect += a.entries(i, j);
    CHECK(cut_weight(all, all, a) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ncut of the trivial partition is zero") {
    auto a = gaussian_affinity(random_points(6, 2, 5), 1.0);
    std::vector<std::vector<int>> part = {{0, 1, 2, 3, 4, 5}};
    CHECK(ncut_value(part, a) == doctest::Approx(0.0));
}

TEST_CASE("ncut of the two-vertex split") {
    Matrix entries(2, 2);
    entries << 0, 1, 1, 0;
    CHECK(ncut_value({{0}, {1}}, from_entries(entries)) ==
          doctest::Approx(2.0));
}

TEST_CASE("ncut matches the direct formula on all 6-point bipartitions") {
    auto a = gaussian_affinity(random_points(6, 2, 9), 1.0);
    std::vector<int> all = {0, 1, 2, 3, 4, 5};
    for (int mask = 1; mask < 31; ++mask) {  // nontrivial subsets of 1..5
        std::vector<int> g0 = {0}, g1;
        for (int v = 1; v < 6; ++v)
            ((mask >> (v - 1)) & 1 ? g0 : g1).push_back(v);
        if (g1.empty()) continue;
        const double w0v = cut_weight(g0, all, a);
        const double w00 = cut_weight(g0, g0, a);
        const double w1v = cut_weight(g1, all, a);
        const double w11 = cut_weight(g1, g1, a);
        const double expect = (w0v - w00) / w0v + (w1v - w11) / w1v;
        CHECK(ncut_value({g0, g1}, a) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("ncut invariance under part relabeling and affinity scaling") {
    auto a = gaussian_affinity(random_points(8, 3, 2), 1.0);
    std::vector<std::vector<int>> part = {{0, 2, 4}, {1, 3}, {5, 6, 7}};
    const double base = ncut_value(part, a);
    CHECK(ncut_value({part[2], part[0], part[1]}, a) ==
          doctest::Approx(base).epsilon(1e-12));
    AffinityMatrix scaled = a;
    scaled.entries *= 7.5;
    CHECK(ncut_value(part, scaled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("ncut rejects non-partitions") {
    auto a = gaussian_affinity(random_points(4, 2, 3), 1.0);
    CHECK_THROWS_AS(ncut_value({{0, 1}, {1, 2, 3}}, a),
                    std::invalid_argument);
    CHECK_THROWS_AS(ncut_value({{0, 1}}, a), std::invalid_argument);
}

TEST_CASE("submatrix restriction keeps entries") {
    auto a = gaussian_affinity(random_points(5, 2, 8), 1.0);
    std::vector<int> keep = {0, 2, 4};
    auto sub = submatrix(a, keep);
    CHECK(sub.size() == 3);
    CHECK(sub.entries(0, 1) == a.entries(0, 2));
    CHECK(sub.entries(1, 2) == a.entries(2, 4));
    CHECK(sub.bandwidth == a.bandwidth);
}

}  // TEST_SUITE
