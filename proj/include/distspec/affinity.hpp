#pragma once
#include <span>
#include <vector>

#include "distspec/types.hpp"

namespace distspec {

/// Dense symmetric affinity matrix with zero diagonal.
struct AffinityMatrix {
    Matrix entries;
    double bandwidth = 0.0;

    Index size() const { return entries.rows(); }
};

/// Normalized graph Laplacian L = D^{-1/2} (D - A) D^{-1/2} plus the degrees
/// it was built from.
struct Laplacian {
    Matrix matrix;
    Vector degrees;

    Index size() const { return matrix.rows(); }
};

/// Gaussian affinities a_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), a_ii = 0.
/// Points are rows of `points`. Throws std::invalid_argument for sigma <= 0
/// or an empty point set.
AffinityMatrix gaussian_affinity(const Matrix& points, double bandwidth);

/// Builds the normalized Laplacian from a precomputed affinity matrix.
/// Isolated vertices (zero degree) are rejected with std::runtime_error.
Laplacian build_laplacian(const AffinityMatrix& affinity);

/// Total edge weight between two vertex groups: sum of a_ij over i in
/// `from`, j in `to`. Either side may be the full vertex set.
double cut_weight(std::span<const int> from, std::span<const int> to,
                  const AffinityMatrix& affinity);

/// Normalized-cut objective of a partition into disjoint groups covering
/// the vertex set: sum_j [W(V_j, V) - W(V_j, V_j)] / W(V_j, V).
double ncut_value(const std::vector<std::vector<int>>& groups,
                  const AffinityMatrix& affinity);

/// Principal submatrix of an affinity restricted to the given vertex ids
/// (bandwidth carried through).
AffinityMatrix submatrix(const AffinityMatrix& affinity,
                         std::span<const int> keep);

}  // namespace distspec
