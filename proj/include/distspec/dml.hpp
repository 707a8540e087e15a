#pragma once
#include <cstdint>
#include <vector>

#include "distspec/types.hpp"

namespace distspec {

/// Result of grouping points into codeword cells: per-point assignment,
/// one centroid row per group, group sizes, and (for rpTree) a flag for
/// leaves that exhausted their split attempts while still oversized.
struct Grouping {
    std::vector<int> assignment;
    Matrix centroids;
    std::vector<std::int64_t> sizes;
    std::vector<std::uint8_t> oversized;

    int group_count() const { return static_cast<int>(centroids.rows()); }
};

enum class DmlMethod { kmeans, rptree };

struct DmlConfig {
    DmlMethod method = DmlMethod::kmeans;
    double compression_ratio = 40.0;  // target points per codeword
    int max_iter = 100;               // kmeans iteration cap
    int min_split = 0;                // rpTree n_T; 0 derives from ratio
    std::uint64_t seed = 0;
};

/// Lloyd's algorithm. Initial centroids are k distinct points drawn without
/// replacement (fewer distinct points than k is an error); nearest-centroid
/// ties break toward the lowest centroid index; a cluster left empty is
/// reseeded with the point farthest from its assigned centroid. Stops when
/// assignments are unchanged or after max_iter sweeps. If ssw_history is
/// given it receives the within-cluster sum of squares after every update
/// step (non-increasing).
Grouping kmeans(const Matrix& points, int k, int max_iter, std::uint64_t seed,
                std::vector<double>* ssw_history = nullptr);

/// Random-projection tree partition: recursively project onto a random unit
/// direction and split at a uniform threshold between the min and max
/// projection, stopping when a cell holds fewer than min_split points.
/// A cell whose draws fail to separate it 8 times in a row becomes a leaf
/// and is flagged oversized.
Grouping rptree_partition(const Matrix& points, int min_split,
                          std::uint64_t seed);

/// Dispatch on cfg.method with codeword count / leaf bound derived from the
/// compression ratio (which must be >= 1): kmeans k = max(1, round(N/ratio));
/// rpTree min_split = round(ratio) when cfg.min_split == 0.
Grouping compress(const Matrix& points, const DmlConfig& cfg);

}  // namespace distspec
