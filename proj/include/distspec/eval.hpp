#pragma once
#include <cstdint>
#include <vector>

#include "distspec/coordinator.hpp"
#include "distspec/dml.hpp"
#include "distspec/types.hpp"

namespace distspec {

/// Fraction of points whose predicted label matches the truth under the
/// best relabeling of clusters. Exact mode enumerates all k! permutations
/// and requires k <= 8; otherwise an optimal assignment is solved directly
/// (same value, no enumeration).
double clustering_accuracy(const std::vector<int>& true_labels,
                           const std::vector<int>& predicted_labels, int k,
                           bool exact = true);

struct DistortionReport {
    std::int64_t codewords = 0;
    double rate = 0.0;  // log2(codewords)
    double mse = 0.0;   // mean squared distance to assigned centroid
};

/// Quantization distortion of a grouping over the points it was built from.
DistortionReport distortion(const Matrix& points, const Grouping& grouping);

/// Uniform perturbation on [-half_width, half_width] applied i.i.d. to
/// every coordinate; sigma() is its standard deviation half_width/sqrt(3).
struct PerturbationSpec {
    double half_width = 0.0;

    double sigma() const;
    static PerturbationSpec from_sigma(double s);
};

/// One perturbation trial on a two-cluster problem.
struct HarnessReport {
    double rho = 0.0;          // fraction of flipped assignments
    double eig_dist_sq = 0.0;  // ||v2~ - v2||^2, signs aligned
    double frob_sq = 0.0;      // ||L~ - L||_F^2
    bool middle_holds = false;  // eig_dist_sq <= frob_sq
    bool outer_holds = false;   // rho <= frob_sq
    bool bound_holds = false;   // both
};

/// Perturbs the points, rebuilds the Laplacian, and reports the quantities
/// of the stability chain rho <= ||v2~ - v2||^2 <= ||L~ - L||_F^2 for the
/// 2-way spectral split.
HarnessReport lemma1_check(const Matrix& points, double bandwidth,
                           const PerturbationSpec& pert, std::uint64_t seed);

/// Least-squares slope of y over x (used for log2(mse) vs log2(codewords)).
double fitted_slope(const std::vector<double>& x,
                    const std::vector<double>& y);

struct RunComparison {
    double accuracy_delta = 0.0;  // nondistributed - distributed
    double speedup = 0.0;         // nondistributed wall / distributed wall
};

/// Compares a distributed run against its single-site baseline; the two
/// reports must agree on k and total point count.
RunComparison compare_runs(const RunReport& distributed,
                           const RunReport& nondistributed);

}  // namespace distspec
