#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "distspec/datagen.hpp"
#include "doctest.h"

using namespace distspec;
namespace fs = std::filesystem;

namespace {

/// Temp file seeded with fixed content; removed on scope exit.
struct ScratchFile {
    fs::path path;
    explicit ScratchFile(const std::string& content) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("distspec_test_" + std::to_string(++counter) + ".txt");
        std::ofstream out(path);
        out << content;
    }
    ~ScratchFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

/// Points whose first coordinate is the original row index, so shard
/// membership can be audited after partitioning.
Matrix indexed_points(int n) {
    Matrix pts(n, 2);
    for (int i = 0; i < n; ++i) {
        pts(i, 0) = i;
        pts(i, 1) = 0.0;
    }
    return pts;
}

std::vector<int> cyclic_labels(int n, int k) {
    std::vector<int> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = i % k;
    return labels;
}

/// Original row ids of one shard, read back from the index coordinate.
std::vector<int> shard_ids(const SiteShard& s) {
    std::vector<int> ids;
    for (Index i = 0; i < s.points.rows(); ++i)
        ids.push_back(static_cast<int>(std::lround(s.points(i, 0))));
    return ids;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("AR covariance profile") {
    auto cov = MixtureSpec::ar_covariance(10, 0.3);
    CHECK(cov(0, 0) == 1.0);
    CHECK(cov(0, 2) == doctest::Approx(0.09));
    CHECK(cov(7, 4) == doctest::Approx(0.027));
    CHECK((cov - cov.transpose()).norm() == 0.0);
    CHECK_THROWS_AS(MixtureSpec::ar_covariance(0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(MixtureSpec::ar_covariance(5, 1.0), std::invalid_argument);
}

TEST_CASE("toy mixture prototype") {
    auto spec = MixtureSpec::toy2d();
    CHECK(spec.components() == 4);
    CHECK(spec.dim() == 2);
    CHECK(spec.means(0, 0) == 2.0);
    CHECK(spec.means(0, 1) == 2.0);
    CHECK(spec.means(1, 0) == -2.0);
    CHECK(spec.means(2, 0) == -2.0);
    CHECK(spec.means(2, 1) == 2.0);
    CHECK(spec.covariance(0, 0) == 3.0);
    CHECK(spec.covariance(0, 1) == 1.0);
    CHECK(spec.covariance(1, 1) == 3.0);
    for (double w : spec.weights) CHECK(w == 0.25);
}

TEST_CASE("10-d pattern prototype") {
    auto spec = MixtureSpec::pattern10d(0.6);
    CHECK(spec.components() == 4);
    CHECK(spec.dim() == 10);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(spec.means(i, j) == (i == j ? 2.5 : 0.0));
    CHECK(spec.covariance(3, 5) == doctest::Approx(0.36));
}

TEST_CASE("empty sample") {
    auto out = sample_mixture(MixtureSpec::toy2d(), 0, 1);
    CHECK(out.points.rows() == 0);
    CHECK(out.labels.empty());
}

TEST_CASE("single-component sample mean satisfies the CLT bound") {
    MixtureSpec spec;
    spec.means.resize(1, 2);
    spec.means << 2, 2;
    spec.covariance.resize(2, 2);
    spec.covariance << 3, 1, 1, 3;
    spec.weights = {1.0};
    auto out = sample_mixture(spec, 10000, 17);
    const double bound = 4.0 * std::sqrt(3.0 / 10000.0);
    CHECK(std::abs(out.points.col(0).mean() - 2.0) < bound);
    CHECK(std::abs(out.points.col(1).mean() - 2.0) < bound);
}

TEST_CASE("sampling is bit-reproducible and seed-sensitive") {
    auto a = sample_mixture(MixtureSpec::toy2d(), 500, 3);
    auto b = sample_mixture(MixtureSpec::toy2d(), 500, 3);
    CHECK((a.points - b.points).norm() == 0.0);
    CHECK(a.labels == b.labels);
    auto c = sample_mixture(MixtureSpec::toy2d(), 500, 4);
    CHECK((a.points - c.points).norm() > 0.0);
}

TEST_CASE("component proportions stay near uniform") {
    auto out = sample_mixture(MixtureSpec::toy2d(), 4000, 1);
    std::vector<int> counts(4, 0);
    for (int c : out.labels) counts[static_cast<size_t>(c)]++;
    for (int c : counts)
        CHECK(std::abs(c / 4000.0 - 0.25) <= 0.03);
}

TEST_CASE("labels identify the generating component") {
    MixtureSpec spec;
    spec.means.resize(2, 2);
    spec.means << 0, 0, 100, 0;
    spec.covariance = Matrix::Identity(2, 2);
    spec.weights = {0.5, 0.5};
    auto out = sample_mixture(spec, 400, 8);
    for (Index i = 0; i < out.points.rows(); ++i) {
        const int nearest = out.points(i, 0) > 50.0 ? 1 : 0;
        CHECK(out.labels[static_cast<size_t>(i)] == nearest);
    }
}

TEST_CASE("mixture validation") {
    auto spec = MixtureSpec::toy2d();
    CHECK_THROWS_AS(sample_mixture(spec, -1, 0), std::invalid_argument);

    auto bad_cov = spec;
    bad_cov.covariance << 1, 2, 2, 1;  // eigenvalues -1 and 3
    CHECK_THROWS_AS(sample_mixture(bad_cov, 10, 0), std::invalid_argument);

    auto bad_w = spec;
    bad_w.weights = {0.5, 0.2, 0.1, 0.1};
    CHECK_THROWS_AS(sample_mixture(bad_w, 10, 0), std::invalid_argument);

    auto short_w = spec;
    short_w.weights = {0.5, 0.5};
    CHECK_THROWS_AS(sample_mixture(short_w, 10, 0), std::invalid_argument);
}

TEST_CASE("whole-component scenario keeps classes together") {
    const int n = 400;
    auto pts = indexed_points(n);
    auto labels = cyclic_labels(n, 4);
    auto shards =
        partition_scenario(pts, labels, ScenarioSpec::preset("syn-d1"), 1);
    REQUIRE(shards.size() == 2);
    std::set<int> s0(shards[0].true_labels.begin(),
                     shards[0].true_labels.end());
    std::set<int> s1(shards[1].true_labels.begin(),
                     shards[1].true_labels.end());
    CHECK(s0 == std::set<int>{0, 1});
    CHECK(s1 == std::set<int>{2, 3});
    CHECK(shards[0].points.rows() == 200);
    CHECK(shards[1].points.rows() == 200);
}

TEST_CASE("fractional scenario splits classes by the preset shares") {
    const int n = 400;  // 100 per class
    auto pts = indexed_points(n);
    auto labels = cyclic_labels(n, 4);
    auto shards =
        partition_scenario(pts, labels, ScenarioSpec::preset("syn-d2"), 5);
    REQUIRE(shards.size() == 2);
    // Site 0 = half of class 0, all of class 1, half of class 2.
    std::vector<int> counts0(4, 0), counts1(4, 0);
    for (int l : shards[0].true_labels) counts0[static_cast<size_t>(l)]++;
    for (int l : shards[1].true_labels) counts1[static_cast<size_t>(l)]++;
    CHECK(counts0 == std::vector<int>{50, 100, 50, 0});
    CHECK(counts1 == std::vector<int>{50, 0, 50, 100});
}

TEST_CASE("random scenario splits near-equally regardless of labels") {
    auto pts = indexed_points(101);
    auto shards =
        partition_scenario(pts, {}, ScenarioSpec::random_split(2), 9);
    REQUIRE(shards.size() == 2);
    std::vector<Index> sizes = {shards[0].points.rows(),
                                shards[1].points.rows()};
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<Index>{50, 51});

    std::vector<int> all;
    for (const auto& s : shards)
        for (int id : shard_ids(s)) all.push_back(id);
    std::sort(all.begin(), all.end());
    std::vector<int> expect(101);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all == expect);
}

TEST_CASE("every scenario yields a disjoint cover in original order") {
    const int n = 237;
    auto pts = indexed_points(n);
    auto labels = cyclic_labels(n, 4);
    for (const char* name : {"syn-d1", "syn-d2", "syn-d3"}) {
        for (std::uint64_t seed : {1u, 2u}) {
            auto shards = partition_scenario(pts, labels,
                                             ScenarioSpec::preset(name), seed);
            std::vector<int> all;
            for (const auto& s : shards) {
                auto ids = shard_ids(s);
                CHECK(std::is_sorted(ids.begin(), ids.end()));
                all.insert(all.end(), ids.begin(), ids.end());
            }
            std::sort(all.begin(), all.end());
            std::vector<int> expect(n);
            std::iota(expect.begin(), expect.end(), 0);
            CHECK(all == expect);
        }
    }
}

TEST_CASE("random scenario roughly preserves class proportions") {
    const int n = 12000;
    auto pts = indexed_points(n);
    auto labels = cyclic_labels(n, 3);  // thirds
    auto shards =
        partition_scenario(pts, labels, ScenarioSpec::random_split(4), 2);
    for (const auto& s : shards) {
        std::vector<int> counts(3, 0);
        for (int l : s.true_labels) counts[static_cast<size_t>(l)]++;
        for (int c : counts) {
            const double frac =
                c / static_cast<double>(s.true_labels.size());
            CHECK(std::abs(frac - 1.0 / 3.0) <= 0.05);
        }
    }
}

TEST_CASE("composition labels are matched by rank, not raw value") {
    auto pts = indexed_points(100);
    std::vector<int> labels(100);
    for (int i = 0; i < 100; ++i) labels[static_cast<size_t>(i)] = i < 60 ? 5 : 9;
    auto shards =
        partition_scenario(pts, labels, ScenarioSpec::preset("uci2-d1"), 1);
    REQUIRE(shards.size() == 2);
    CHECK(shards[0].points.rows() == 60);  // all label-5 rows
    CHECK(shards[1].points.rows() == 40);
    for (int l : shards[0].true_labels) CHECK(l == 5);
    for (int l : shards[1].true_labels) CHECK(l == 9);
}

TEST_CASE("scenario validation") {
    auto pts = indexed_points(40);
    auto labels = cyclic_labels(40, 2);

    CHECK_THROWS_AS(ScenarioSpec::preset("no-such-preset"),
                    std::invalid_argument);

    ScenarioSpec half;
    half.scenario = Scenario::d2;
    half.sites = 2;
    half.composition = {{{0, 0.5}, {1, 0.5}}, {{1, 0.5}}};  // class 0 short
    CHECK_THROWS_AS(partition_scenario(pts, labels, half, 1),
                    std::invalid_argument);

    ScenarioSpec absent;
    absent.scenario = Scenario::d1;
    absent.sites = 2;
    absent.composition = {{{0, 1.0}, {1, 1.0}}, {{2, 1.0}}};
    CHECK_THROWS_AS(partition_scenario(pts, labels, absent, 1),
                    std::invalid_argument);

    // Data has classes {0,1} but the scenario only routes class 0.
    ScenarioSpec unrouted;
    unrouted.scenario = Scenario::d1;
    unrouted.sites = 2;
    unrouted.composition = {{{0, 0.5}}, {{0, 0.5}}};
    CHECK_THROWS_AS(partition_scenario(pts, labels, unrouted, 1),
                    std::invalid_argument);

    CHECK_THROWS_AS(
        partition_scenario(pts, {}, ScenarioSpec::preset("syn-d1"), 1),
        std::invalid_argument);
    CHECK_THROWS_AS(ScenarioSpec::random_split(0), std::invalid_argument);
}

TEST_CASE("preset catalog constructs and pins the 4-site shares") {
    auto names = ScenarioSpec::preset_names();
    CHECK(names.size() == 21);
    for (const auto& name : names) CHECK_NOTHROW(ScenarioSpec::preset(name));

    auto four = ScenarioSpec::preset("hepmass-4site-d2");
    REQUIRE(four.sites == 4);
    CHECK(four.composition[0].at(0) == 0.375);
    CHECK(four.composition[0].at(1) == 0.125);
    CHECK(four.composition[3].at(0) == 0.125);
    CHECK(four.composition[3].at(1) == 0.375);

    auto three = ScenarioSpec::preset("hepmass-3site-d1");
    REQUIRE(three.sites == 3);
    CHECK(three.composition[0].at(0) == 0.5);
    CHECK(three.composition[2].at(1) == 1.0);
}

TEST_CASE("delimited files load points and labels") {
    ScratchFile f("1.5,2,0\n-3,0.25,1\n4,4,0\n");
    LoadOptions opt;
    opt.label_column = -1;
    auto ds = load_dataset(f.path, opt);
    REQUIRE(ds.points.rows() == 3);
    CHECK(ds.points.cols() == 2);
    CHECK(ds.has_labels);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.points(0, 0) == 1.5);
    CHECK(ds.points(1, 1) == 0.25);
    CHECK(ds.dropped_rows == 0);
}

TEST_CASE("whitespace-delimited files load too") {
    ScratchFile f("1 2\n3 4\n");
    auto ds = load_dataset(f.path, {});
    CHECK(ds.points.rows() == 2);
    CHECK(!ds.has_labels);
    CHECK(ds.points(1, 0) == 3.0);
}

TEST_CASE("header rows are skipped when flagged") {
    ScratchFile f("x,y,label\n1,2,0\n3,4,1\n");
    LoadOptions opt;
    opt.has_header = true;
    opt.label_column = -1;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.points.rows() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("rows with missing values are dropped and counted") {
    ScratchFile f("1,2,0\n?,2,1\n3,,0\n4,5,1\n");
    LoadOptions opt;
    opt.label_column = -1;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.points.rows() == 2);
    CHECK(ds.dropped_rows == 2);
    CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("malformed fields are reported with their line number") {
    ScratchFile f("1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(load_dataset(f.path, {}),
                         "line 2: unparsable value 'oops'",
                         std::runtime_error);

    ScratchFile g("1,2\n3\n");
    CHECK_THROWS_WITH_AS(load_dataset(g.path, {}),
                         "line 2: expected 2 fields, got 1",
                         std::runtime_error);

    CHECK_THROWS_AS(load_dataset(fs::path("/no/such/file.txt"), {}),
                    std::runtime_error);
}

TEST_CASE("categorical labels are coded by sorted distinct value") {
    ScratchFile f("1,2,positive\n3,4,negative\n5,6,positive\n");
    LoadOptions opt;
    opt.label_column = -1;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.labels == std::vector<int>{1, 0, 1});  // negative < positive

    opt.map_categoricals = false;
    CHECK_THROWS_AS(load_dataset(f.path, opt), std::runtime_error);
}

TEST_CASE("integer labels pass through unmapped") {
    ScratchFile f("1,2,7\n3,4,3\n");
    LoadOptions opt;
    opt.label_column = -1;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.labels == std::vector<int>{7, 3});
}

TEST_CASE("label column can be any index") {
    ScratchFile f("2,1.5,2.5\n1,0.5,3.5\n");
    LoadOptions opt;
    opt.label_column = 0;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.labels == std::vector<int>{2, 1});
    CHECK(ds.points(0, 0) == 1.5);
    CHECK(ds.points.cols() == 2);

    opt.label_column = 5;
    CHECK_THROWS_AS(load_dataset(f.path, opt), std::invalid_argument);
}

TEST_CASE("standardization yields mean zero and unit deviation") {
    ScratchFile f("1,10\n2,20\n3,30\n4,40\n");
    LoadOptions opt;
    opt.standardize = true;
    auto ds = load_dataset(f.path, opt);
    for (Index j = 0; j < ds.points.cols(); ++j) {
        CHECK(std::abs(ds.points.col(j).mean()) < 1e-9);
        const double sd =
            std::sqrt(ds.points.col(j).squaredNorm() / ds.points.rows());
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(ds.centered_only_features.empty());
}

TEST_CASE("constant features are centered but left unscaled") {
    ScratchFile f("5,1\n5,2\n5,3\n");
    LoadOptions opt;
    opt.standardize = true;
    auto ds = load_dataset(f.path, opt);
    CHECK(ds.centered_only_features == std::vector<int>{0});
    CHECK(ds.points.col(0).norm() == 0.0);
    const double sd =
        std::sqrt(ds.points.col(1).squaredNorm() / ds.points.rows());
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dataset writing round-trips through loading") {
    auto sampled = sample_mixture(MixtureSpec::toy2d(), 50, 11);
    std::ostringstream buf;
    write_dataset(buf, sampled.points, sampled.labels);
    ScratchFile f(buf.str());
    LoadOptions opt;
    opt.label_column = -1;
    auto back = load_dataset(f.path, opt);
    REQUIRE(back.points.rows() == 50);
    CHECK((back.points - sampled.points).norm() == 0.0);  // bit-exact floats
    CHECK(back.labels == sampled.labels);
}

}  // TEST_SUITE
