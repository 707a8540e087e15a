#include "distspec/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "distspec/eval.hpp"

namespace distspec {
namespace {

Vector oriented_second(const Eigen::SelfAdjointEigenSolver<Matrix>& es,
                       Index n) {
    if (n > 2) {
        // A (near-)repeated second eigenvalue means the Fiedler direction is
        // not identified; duplicated point sets land here.
        const double gap = es.eigenvalues()[2] - es.eigenvalues()[1];
        const double scale = std::max(1.0, std::abs(es.eigenvalues()[2]));
        if (gap <= 1e-12 * scale)
            throw DegenerateSpectrumError("repeated second eigenvalue");
    }
    Vector v = es.eigenvectors().col(1);
    for (Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            if (v[i] < 0.0) v = -v;
            break;
        }
    }
    return v;
}

}  // namespace

Vector second_eigenvector(const Laplacian& lap) {
    const Index n = lap.size();
    if (n < 2) throw std::invalid_argument("need at least two vertices");
    Eigen::SelfAdjointEigenSolver<Matrix> es(lap.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    return oriented_second(es, n);
}

BipartitionResult bipartition(const AffinityMatrix& affinity,
                              const Vector* degree_weights) {
    const Index n = affinity.size();
    if (n < 2) throw std::invalid_argument("need at least two vertices");

    Laplacian lap = build_laplacian(affinity);
    if (degree_weights) {
        if (degree_weights->size() != n)
            throw std::invalid_argument("weight vector size mismatch");
        Vector scaled = lap.degrees.cwiseProduct(*degree_weights);
        for (Index i = 0; i < n; ++i)
            if (!(scaled[i] > 0.0))
                throw std::runtime_error("nonpositive weighted degree");
        Vector dinv = scaled.array().rsqrt();
        Matrix lsym = -affinity.entries;
        lsym.diagonal() = scaled;
        lap.matrix = dinv.asDiagonal() * lsym * dinv.asDiagonal();
        lap.matrix = ((lap.matrix + lap.matrix.transpose()) * 0.5).eval();
        lap.degrees = scaled;
    }

    Vector v2 = second_eigenvector(lap);

    std::vector<double> distinct(v2.data(), v2.data() + n);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() < 2)
        throw DegenerateSpectrumError("constant second eigenvector");

    BipartitionResult best;
    best.fiedler = v2;
    best.ncut = std::numeric_limits<double>::infinity();
    Index best_balance = -1;

    // Sweep thresholds between consecutive distinct values, ascending, so
    // ties resolve to the more balanced split and then the smaller
    // threshold (strict improvement only). The cut sums are maintained
    // incrementally while vertices move below the threshold.
    const Vector deg = affinity.entries.rowwise().sum();
    const double total = deg.sum();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return v2[a] < v2[b]; });

    Vector row_in_low = Vector::Zero(n);  // per vertex: affinity into A
    double s_aa = 0.0;                    // W(A, A)
    double s_av = 0.0;                    // W(A, V)
    size_t pos = 0;
    while (pos < static_cast<size_t>(n)) {
        const double val = v2[order[pos]];
        while (pos < static_cast<size_t>(n) && v2[order[pos]] == val) {
            const Index v = order[pos];
            s_aa += 2.0 * row_in_low[v];
            s_av += deg[v];
            row_in_low += affinity.entries.col(v);
            ++pos;
        }
        if (pos == static_cast<size_t>(n)) break;

        const double thr = 0.5 * (val + v2[order[pos]]);
        const double boundary = s_av - s_aa;  // W(A, B), both numerators
        const double cut = boundary / s_av + boundary / (total - s_av);
        const Index balance = std::min<Index>(static_cast<Index>(pos),
                                              n - static_cast<Index>(pos));
        const bool better =
            cut < best.ncut - 1e-15 ||
            (std::abs(cut - best.ncut) <= 1e-15 && balance > best_balance);
        if (better) {
            best.split_value = thr;
            best.ncut = cut;
            best_balance = balance;
        }
    }

    best.labels.resize(static_cast<size_t>(n));
    std::vector<int> lo, hi;
    for (Index i = 0; i < n; ++i) {
        const bool low = v2[i] <= best.split_value;
        best.labels[static_cast<size_t>(i)] = low ? 0 : 1;
        (low ? lo : hi).push_back(static_cast<int>(i));
    }
    best.ncut = ncut_value({lo, hi}, affinity);
    return best;
}

std::vector<int> normalized_cuts(const AffinityMatrix& affinity, int k,
                                 const Vector* degree_weights) {
    const Index n = affinity.size();
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (static_cast<Index>(k) > n)
        throw std::invalid_argument("k exceeds vertex count");
    if (degree_weights && degree_weights->size() != n)
        throw std::invalid_argument("weight vector size mismatch");

    std::vector<std::vector<int>> clusters(1);
    clusters[0].resize(static_cast<size_t>(n));
    std::iota(clusters[0].begin(), clusters[0].end(), 0);

    while (static_cast<int>(clusters.size()) < k) {
        // Split the largest cluster; size ties go to the earliest created.
        size_t target = 0;
        for (size_t c = 1; c < clusters.size(); ++c)
            if (clusters[c].size() > clusters[target].size()) target = c;
        if (clusters[target].size() < 2)
            throw std::runtime_error("cannot split singleton cluster");

        const auto& ids = clusters[target];
        AffinityMatrix sub = submatrix(affinity, ids);
        Vector subw;
        const Vector* wptr = nullptr;
        if (degree_weights) {
            subw.resize(static_cast<Index>(ids.size()));
            for (size_t i = 0; i < ids.size(); ++i)
                subw[static_cast<Index>(i)] = (*degree_weights)[ids[i]];
            wptr = &subw;
        }
        BipartitionResult part = bipartition(sub, wptr);

        std::vector<int> keep, spun;
        for (size_t i = 0; i < ids.size(); ++i)
            (part.labels[i] == 0 ? keep : spun).push_back(ids[i]);
        clusters[target] = std::move(keep);
        clusters.push_back(std::move(spun));
    }

    // Label clusters 0..k-1 by ascending smallest member index.
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<int> labels(static_cast<size_t>(n), -1);
    for (size_t c = 0; c < clusters.size(); ++c)
        for (int v : clusters[c]) labels[static_cast<size_t>(v)] = static_cast<int>(c);
    return labels;
}

std::vector<int> normalized_cuts(const Matrix& points, int k,
                                 double bandwidth) {
    return normalized_cuts(gaussian_affinity(points, bandwidth), k);
}

BandwidthGrid BandwidthGrid::coarse() {
    return {{0.1, 0.5, 1.0, 2.0, 4.0, 8.0}};
}

BandwidthGrid BandwidthGrid::full() {
    BandwidthGrid g;
    for (int i = 1; i <= 100; ++i) g.values.push_back(i / 100.0);
    for (int i = 11; i <= 2000; ++i) g.values.push_back(i / 10.0);
    return g;
}

BandwidthGrid BandwidthGrid::log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("bad grid parameters");
    BandwidthGrid g;
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i)
        g.values.push_back(std::exp(std::log(lo) + step * i));
    return g;
}

double select_bandwidth(const Matrix& points,
                        const std::vector<int>& reference_labels, int k,
                        const BandwidthGrid& grid) {
    if (grid.values.empty()) throw std::invalid_argument("empty grid");
    if (reference_labels.empty())
        throw std::invalid_argument(
            "bandwidth search needs reference labels; for unlabeled data "
            "use the median pairwise distance heuristic");
    double best_sigma = 0.0;
    double best_acc = -1.0;
    for (double sigma : grid.values) {
        double acc;
        try {
            std::vector<int> pred = normalized_cuts(points, k, sigma);
            acc = clustering_accuracy(reference_labels, pred, k, k <= 8);
        } catch (const DegenerateSpectrumError&) {
            continue;  // unusable bandwidth for this data
        }
        if (acc > best_acc + 1e-12) {  // ties keep the smaller bandwidth
            best_acc = acc;
            best_sigma = sigma;
        }
    }
    if (best_acc < 0.0)
        throw std::runtime_error("no usable bandwidth in grid");
    return best_sigma;
}

double median_pairwise_distance(const Matrix& points) {
    const Index n = points.rows();
    if (n < 2) throw std::invalid_argument("need at least two points");
    std::vector<double> d;
    d.reserve(static_cast<size_t>(n) * (static_cast<size_t>(n) - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            d.push_back((points.row(i) - points.row(j)).norm());
    const size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid),
                     d.end());
    double hi = d[mid];
    if (d.size() % 2 == 1) return hi;
    std::nth_element(d.begin(),
                     d.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     d.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (d[mid - 1] + hi);
}

}  // namespace distspec
