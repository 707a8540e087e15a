#include "distspec/dml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "distspec/random.hpp"

namespace distspec {
namespace {

double sum_sq_within(const Matrix& points, const std::vector<int>& assign,
                     const Matrix& centroids) {
    double s = 0.0;
    for (Index i = 0; i < points.rows(); ++i)
        s += (points.row(i) - centroids.row(assign[static_cast<size_t>(i)]))
                 .squaredNorm();
    return s;
}

struct RpNode {
    std::vector<Index> members;
    bool oversized = false;
};

void rp_split(const Matrix& points, std::vector<Index> members, int min_split,
              std::mt19937_64& rng, std::vector<RpNode>& leaves) {
    if (static_cast<int>(members.size()) < min_split) {
        leaves.push_back({std::move(members), false});
        return;
    }
    const Index d = points.cols();
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int attempt = 0; attempt < 8; ++attempt) {
        Vector dir(d);
        for (Index j = 0; j < d; ++j) dir[j] = gauss(rng);
        const double norm = dir.norm();
        if (norm == 0.0) continue;
        dir /= norm;

        std::vector<double> proj(members.size());
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (size_t i = 0; i < members.size(); ++i) {
            proj[i] = points.row(members[i]).dot(dir);
            lo = std::min(lo, proj[i]);
            hi = std::max(hi, proj[i]);
        }
        std::uniform_real_distribution<double> unif(lo, hi);
        const double c = unif(rng);

        std::vector<Index> left, right;
        for (size_t i = 0; i < members.size(); ++i)
            (proj[i] < c ? left : right).push_back(members[i]);
        if (left.empty() || right.empty()) continue;

        rp_split(points, std::move(left), min_split, rng, leaves);
        rp_split(points, std::move(right), min_split, rng, leaves);
        return;
    }
    // Could not separate the cell (e.g. all points coincide): keep it
    // whole but flag that it exceeds the leaf bound.
    leaves.push_back({std::move(members), true});
}

}  // namespace

Grouping kmeans(const Matrix& points, int k, int max_iter, std::uint64_t seed,
                std::vector<double>* ssw_history) {
    const Index n = points.rows();
    if (n == 0) throw std::invalid_argument("empty point set");
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (static_cast<Index>(k) > n)
        throw std::invalid_argument("k exceeds point count");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");

    auto rng = make_engine(seed);

    // Initial centroids: a seeded uniform sample of k distinct rows.
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Index> chosen;
    for (Index cand : order) {
        bool fresh = true;
        for (Index c : chosen)
            if (points.row(cand) == points.row(c)) {
                fresh = false;
                break;
            }
        if (fresh) chosen.push_back(cand);
        if (static_cast<int>(chosen.size()) == k) break;
    }
    if (static_cast<int>(chosen.size()) < k)
        throw std::runtime_error("k exceeds the number of distinct points");

    Matrix centroids(k, points.cols());
    for (int c = 0; c < k; ++c)
        centroids.row(c) = points.row(chosen[static_cast<size_t>(c)]);

    std::vector<int> assign(static_cast<size_t>(n), -1);
    std::vector<std::int64_t> sizes(static_cast<size_t>(k), 0);

    auto assign_all = [&]() {
        bool changed = false;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d =
                    (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {  // ties keep the lowest index
                    best_d = d;
                    best = c;
                }
            }
            if (assign[static_cast<size_t>(i)] != best) changed = true;
            assign[static_cast<size_t>(i)] = best;
            ++sizes[static_cast<size_t>(best)];
        }
        return changed;
    };

    auto update_centroids = [&]() {
        Matrix sums = Matrix::Zero(k, points.cols());
        for (Index i = 0; i < n; ++i)
            sums.row(assign[static_cast<size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<size_t>(c)] > 0) {
                centroids.row(c) =
                    sums.row(c) /
                    static_cast<double>(sizes[static_cast<size_t>(c)]);
            } else {
                // Re-seed an emptied cluster at the point farthest from its
                // assigned centroid; harmless for SSW (no members yet).
                Index far = 0;
                double far_d = -1.0;
                for (Index i = 0; i < n; ++i) {
                    const double d =
                        (points.row(i) -
                         centroids.row(assign[static_cast<size_t>(i)]))
                            .squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.row(c) = points.row(far);
            }
        }
    };

    assign_all();
    for (int iter = 0; iter < max_iter; ++iter) {
        update_centroids();
        if (ssw_history)
            ssw_history->push_back(sum_sq_within(points, assign, centroids));
        if (!assign_all()) break;
    }

    // Restore the fixed-point invariants on every exit path: no group may
    // be empty and every centroid must be the mean of its members.
    while (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
        const int empty = static_cast<int>(
            std::find(sizes.begin(), sizes.end(), 0) - sizes.begin());
        Index far = -1;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
            const int g = assign[static_cast<size_t>(i)];
            if (sizes[static_cast<size_t>(g)] < 2) continue;
            const double d =
                (points.row(i) - centroids.row(g)).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        --sizes[static_cast<size_t>(assign[static_cast<size_t>(far)])];
        assign[static_cast<size_t>(far)] = empty;
        ++sizes[static_cast<size_t>(empty)];
    }
    {
        Matrix sums = Matrix::Zero(k, points.cols());
        for (Index i = 0; i < n; ++i)
            sums.row(assign[static_cast<size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c)
            centroids.row(c) =
                sums.row(c) / static_cast<double>(sizes[static_cast<size_t>(c)]);
    }

    Grouping g;
    g.assignment = std::move(assign);
    g.centroids = std::move(centroids);
    g.sizes = std::move(sizes);
    g.oversized.assign(static_cast<size_t>(k), 0);
    return g;
}

Grouping rptree_partition(const Matrix& points, int min_split,
                          std::uint64_t seed) {
    const Index n = points.rows();
    if (n == 0) throw std::invalid_argument("empty point set");
    if (min_split < 2)
        throw std::invalid_argument("min_split must be at least 2");

    auto rng = make_engine(seed);
    std::vector<Index> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    std::vector<RpNode> leaves;
    rp_split(points, std::move(all), min_split, rng, leaves);

    Grouping g;
    g.assignment.resize(static_cast<size_t>(n));
    g.centroids.resize(static_cast<Index>(leaves.size()), points.cols());
    g.sizes.resize(leaves.size());
    g.oversized.resize(leaves.size());
    for (size_t c = 0; c < leaves.size(); ++c) {
        Vector mean = Vector::Zero(points.cols());
        for (Index i : leaves[c].members) {
            g.assignment[static_cast<size_t>(i)] = static_cast<int>(c);
            mean += points.row(i).transpose();
        }
        mean /= static_cast<double>(leaves[c].members.size());
        g.centroids.row(static_cast<Index>(c)) = mean.transpose();
        g.sizes[c] = static_cast<std::int64_t>(leaves[c].members.size());
        g.oversized[c] = leaves[c].oversized ? 1 : 0;
    }
    return g;
}

Grouping compress(const Matrix& points, const DmlConfig& cfg) {
    if (!(cfg.compression_ratio >= 1.0))
        throw std::invalid_argument("compression ratio must be at least 1");
    const Index n = points.rows();
    if (cfg.method == DmlMethod::kmeans) {
        const int k = std::max<int>(
            1, static_cast<int>(std::llround(static_cast<double>(n) /
                                             cfg.compression_ratio)));
        return kmeans(points, k, cfg.max_iter, cfg.seed);
    }
    const int n_t = cfg.min_split != 0
                        ? cfg.min_split
                        : static_cast<int>(std::llround(cfg.compression_ratio));
    return rptree_partition(points, n_t, cfg.seed);
}

}  // namespace distspec
