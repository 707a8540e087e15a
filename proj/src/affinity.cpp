#include "distspec/affinity.hpp"

#include <cmath>
#include <stdexcept>

namespace distspec {

AffinityMatrix gaussian_affinity(const Matrix& points, double bandwidth) {
    if (points.rows() == 0) throw std::invalid_argument("empty point set");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("bandwidth must be positive");

    const Index n = points.rows();
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);

    // ||x_i - x_j||^2 = ||x_i||^2 + ||x_j||^2 - 2 x_i . x_j
    Vector sq = points.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * points * points.transpose()).eval();
    d2.colwise() += sq;
    d2.rowwise() += sq.transpose();

    AffinityMatrix out;
    out.bandwidth = bandwidth;
    out.entries = (-d2.cwiseMax(0.0) * inv).array().exp();
    out.entries.diagonal().setZero();
    // Enforce exact symmetry against rounding in the product above.
    out.entries = ((out.entries + out.entries.transpose()) * 0.5).eval();
    (void)n;
    return out;
}

Laplacian build_laplacian(const AffinityMatrix& affinity) {
    const Index n = affinity.size();
    if (n == 0) throw std::invalid_argument("empty affinity");

    Laplacian lap;
    lap.degrees = affinity.entries.rowwise().sum();
    for (Index i = 0; i < n; ++i)
        if (!(lap.degrees[i] > 0.0))
            throw std::runtime_error("isolated vertex in affinity graph");

    Vector dinv = lap.degrees.array().rsqrt();
    Matrix lsym = -affinity.entries;
    lsym.diagonal() = lap.degrees;
    lap.matrix = dinv.asDiagonal() * lsym * dinv.asDiagonal();
    lap.matrix = ((lap.matrix + lap.matrix.transpose()) * 0.5).eval();
    return lap;
}

double cut_weight(std::span<const int> from, std::span<const int> to,
                  const AffinityMatrix& affinity) {
    double w = 0.0;
    for (int i : from)
        for (int j : to) w += affinity.entries(i, j);
    return w;
}

double ncut_value(const std::vector<std::vector<int>>& groups,
                  const AffinityMatrix& affinity) {
    const Index n = affinity.size();
    std::vector<int> all(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = static_cast<int>(i);

    std::vector<char> seen(static_cast<size_t>(n), 0);
    size_t covered = 0;
    for (const auto& g : groups) {
        for (int v : g) {
            if (v < 0 || v >= n || seen[static_cast<size_t>(v)])
                throw std::invalid_argument("groups must partition vertices");
            seen[static_cast<size_t>(v)] = 1;
            ++covered;
        }
    }
    if (covered != static_cast<size_t>(n))
        throw std::invalid_argument("groups must partition vertices");

    double total = 0.0;
    for (const auto& g : groups) {
        double assoc = cut_weight(g, all, affinity);
        if (!(assoc > 0.0))
            throw std::runtime_error("group with zero association");
        double internal = cut_weight(g, g, affinity);
        total += (assoc - internal) / assoc;
    }
    return total;
}

AffinityMatrix submatrix(const AffinityMatrix& affinity,
                         std::span<const int> keep) {
    AffinityMatrix out;
    out.bandwidth = affinity.bandwidth;
    const Index m = static_cast<Index>(keep.size());
    out.entries.resize(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c)
            out.entries(r, c) = affinity.entries(keep[static_cast<size_t>(r)],
                                                 keep[static_cast<size_t>(c)]);
    return out;
}

}  // namespace distspec
