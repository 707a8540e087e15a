#pragma once
#include <stdexcept>
#include <vector>

#include "distspec/affinity.hpp"
#include "distspec/types.hpp"

namespace distspec {

/// Raised when the spectrum cannot support a meaningful bipartition
/// (repeated second eigenvalue up to tolerance, or a constant second
/// eigenvector), e.g. for duplicated points.
struct DegenerateSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Second-smallest eigenvector of the normalized Laplacian, deterministic
/// sign: first nonzero component is positive.
Vector second_eigenvector(const Laplacian& lap);

struct BipartitionResult {
    std::vector<int> labels;   // 0/1 per vertex
    double split_value = 0.0;  // chosen threshold on the eigenvector
    double ncut = 0.0;         // ncut of the returned 2-way partition
    Vector fiedler;
};

/// Two-way split by sweeping thresholds over the second eigenvector and
/// keeping the cut with the smallest ncut. Ties prefer the more balanced
/// split, then the smaller threshold. Optional per-vertex weights scale
/// the degrees before forming the Laplacian.
BipartitionResult bipartition(const AffinityMatrix& affinity,
                              const Vector* degree_weights = nullptr);

/// Recursive normalized cuts into exactly k clusters: repeatedly bipartition
/// the largest current cluster. Final labels are 0..k-1 ordered by each
/// cluster's smallest member index.
std::vector<int> normalized_cuts(const AffinityMatrix& affinity, int k,
                                 const Vector* degree_weights = nullptr);
std::vector<int> normalized_cuts(const Matrix& points, int k,
                                 double bandwidth);

/// Candidate bandwidths for model selection.
struct BandwidthGrid {
    std::vector<double> values;

    static BandwidthGrid coarse();  // {0.1, 0.5, 1, 2, 4, 8}
    /// Full search range: step 0.01 on (0, 1], step 0.1 on (1, 200].
    static BandwidthGrid full();
    static BandwidthGrid log_spaced(double lo, double hi, int count);
};

/// Picks the grid value maximizing clustering accuracy of normalized cuts
/// against the given reference labels; ties go to the smallest bandwidth.
double select_bandwidth(const Matrix& points,
                        const std::vector<int>& reference_labels, int k,
                        const BandwidthGrid& grid);

/// Median of all pairwise Euclidean distances; the default bandwidth
/// heuristic when no labels are available.
double median_pairwise_distance(const Matrix& points);

}  // namespace distspec
