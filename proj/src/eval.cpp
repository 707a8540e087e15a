#include "distspec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "distspec/random.hpp"
#include "distspec/spectral.hpp"

namespace distspec {
namespace {

// Dense 0-based ranks of the distinct values, preserving value order.
std::vector<int> to_ranks(const std::vector<int>& labels) {
    std::vector<int> distinct(labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    std::map<int, int> rank;
    for (size_t i = 0; i < distinct.size(); ++i)
        rank[distinct[i]] = static_cast<int>(i);
    std::vector<int> out;
    out.reserve(labels.size());
    for (int v : labels) out.push_back(rank.at(v));
    return out;
}

// Max-total-count assignment of true classes to predicted classes via the
// Hungarian method on the negated count matrix (O(K^3)).
long long best_assignment(const std::vector<std::vector<long long>>& count) {
    const int k = static_cast<int>(count.size());
    long long top = 0;
    for (const auto& row : count)
        for (long long c : row) top = std::max(top, c);

    const int n = k;
    std::vector<std::vector<long long>> cost(
        static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                top - count[static_cast<size_t>(i)][static_cast<size_t>(j)];

    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(static_cast<size_t>(n + 1)),
        v(static_cast<size_t>(n + 1));
    std::vector<int> match(static_cast<size_t>(n + 1), 0),
        way(static_cast<size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(static_cast<size_t>(n + 1), inf);
        std::vector<char> used(static_cast<size_t>(n + 1), 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = match[static_cast<size_t>(j0)];
            long long delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const long long cur =
                    cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                    u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(match[static_cast<size_t>(j)])] +=
                        delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    long long total = 0;
    for (int j = 1; j <= n; ++j)
        total += count[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)]
                      [static_cast<size_t>(j - 1)];
    return total;
}

}  // namespace

double clustering_accuracy(const std::vector<int>& true_labels,
                           const std::vector<int>& predicted_labels, int k,
                           bool exact) {
    if (true_labels.empty())
        throw std::invalid_argument("empty label vectors");
    if (true_labels.size() != predicted_labels.size())
        throw std::invalid_argument("label vector length mismatch");
    if (k < 1) throw std::invalid_argument("k must be positive");

    const std::vector<int> t = to_ranks(true_labels);
    const std::vector<int> p = to_ranks(predicted_labels);
    const int kt = 1 + *std::max_element(t.begin(), t.end());
    const int kp = 1 + *std::max_element(p.begin(), p.end());
    if (kt > k || kp > k)
        throw std::invalid_argument("more distinct labels than k");

    std::vector<std::vector<long long>> count(
        static_cast<size_t>(k), std::vector<long long>(static_cast<size_t>(k), 0));
    for (size_t i = 0; i < t.size(); ++i)
        ++count[static_cast<size_t>(t[i])][static_cast<size_t>(p[i])];

    long long best = 0;
    if (exact) {
        if (k > 8)
            throw std::invalid_argument(
                "exact accuracy enumerates k! permutations and needs k <= 8; "
                "merge classes or use assignment mode");
        std::vector<int> perm(static_cast<size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            long long s = 0;
            for (int c = 0; c < k; ++c)
                s += count[static_cast<size_t>(c)]
                          [static_cast<size_t>(perm[static_cast<size_t>(c)])];
            best = std::max(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        best = best_assignment(count);
    }
    return static_cast<double>(best) / static_cast<double>(t.size());
}

DistortionReport distortion(const Matrix& points, const Grouping& grouping) {
    const Index n = points.rows();
    if (n == 0) throw std::invalid_argument("empty point set");
    if (static_cast<Index>(grouping.assignment.size()) != n)
        throw std::invalid_argument("grouping does not cover the points");
    const int groups = grouping.group_count();
    double sq = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int g = grouping.assignment[static_cast<size_t>(i)];
        if (g < 0 || g >= groups)
            throw std::invalid_argument("assignment outside grouping");
        sq += (points.row(i) - grouping.centroids.row(g)).squaredNorm();
    }
    DistortionReport rep;
    rep.codewords = groups;
    rep.rate = std::log2(static_cast<double>(groups));
    rep.mse = sq / static_cast<double>(n);
    return rep;
}

double PerturbationSpec::sigma() const {
    return half_width / std::sqrt(3.0);
}

PerturbationSpec PerturbationSpec::from_sigma(double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    return {s * std::sqrt(3.0)};
}

HarnessReport lemma1_check(const Matrix& points, double bandwidth,
                           const PerturbationSpec& pert, std::uint64_t seed) {
    const Index n = points.rows();
    if (n > 500)
        throw std::invalid_argument("harness is limited to 500 points");
    if (!(pert.half_width >= 0.0))
        throw std::invalid_argument("negative perturbation width");

    AffinityMatrix base_aff = gaussian_affinity(points, bandwidth);
    Laplacian base_lap = build_laplacian(base_aff);
    BipartitionResult base = bipartition(base_aff);

    Matrix noisy = points;
    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> unif(-pert.half_width,
                                                pert.half_width);
    for (Index i = 0; i < noisy.rows(); ++i)
        for (Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += unif(rng);

    AffinityMatrix pert_aff = gaussian_affinity(noisy, bandwidth);
    Laplacian pert_lap = build_laplacian(pert_aff);
    BipartitionResult perturbed = bipartition(pert_aff);

    HarnessReport rep;
    rep.frob_sq = (pert_lap.matrix - base_lap.matrix).squaredNorm();
    rep.eig_dist_sq =
        std::min((perturbed.fiedler - base.fiedler).squaredNorm(),
                 (perturbed.fiedler + base.fiedler).squaredNorm());

    // Mis-clustering against the unperturbed split, best of the two
    // side-matchings (cluster sides carry no intrinsic identity).
    Index direct = 0;
    for (Index i = 0; i < n; ++i)
        if (base.labels[static_cast<size_t>(i)] !=
            perturbed.labels[static_cast<size_t>(i)])
            ++direct;
    rep.rho = static_cast<double>(std::min(direct, n - direct)) /
              static_cast<double>(n);

    rep.middle_holds = rep.eig_dist_sq <= rep.frob_sq + 1e-9;
    rep.outer_holds = rep.rho <= rep.frob_sq + 1e-9;
    rep.bound_holds = rep.middle_holds && rep.outer_holds;
    return rep;
}

double fitted_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("need matched series of length >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate abscissa");
    return sxy / sxx;
}

RunComparison compare_runs(const RunReport& distributed,
                           const RunReport& nondistributed) {
    if (distributed.k != nondistributed.k ||
        distributed.total_points != nondistributed.total_points)
        throw std::invalid_argument("reports describe different problems");
    if (!distributed.accuracy || !nondistributed.accuracy)
        throw std::invalid_argument("both reports need accuracies");
    if (!(distributed.effective_wall_seconds > 0.0))
        throw std::invalid_argument("distributed wall time must be positive");
    RunComparison cmp;
    cmp.accuracy_delta = *nondistributed.accuracy - *distributed.accuracy;
    cmp.speedup = nondistributed.effective_wall_seconds /
                  distributed.effective_wall_seconds;
    return cmp;
}

}  // namespace distspec
