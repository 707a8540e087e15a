#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "distspec/site.hpp"
#include "distspec/types.hpp"

namespace distspec {

/// Gaussian mixture with shared covariance across components.
struct MixtureSpec {
    Matrix means;       // one row per component
    Matrix covariance;  // shared, d x d
    std::vector<double> weights;

    int components() const { return static_cast<int>(means.rows()); }
    int dim() const { return static_cast<int>(means.cols()); }

    /// AR(1)-structured covariance: cov_ij = rho^|i-j|.
    static Matrix ar_covariance(int dim, double rho);

    /// Four equally weighted 2-D components at (2,2), (-2,-2), (-2,2),
    /// (2,-2) with covariance [[3,1],[1,3]].
    static MixtureSpec toy2d();

    /// Four equally weighted 10-D components, component i centered at
    /// 2.5 e_i, AR(1) covariance at the given rho.
    static MixtureSpec pattern10d(double rho);
};

struct LabeledPoints {
    Matrix points;
    std::vector<int> labels;
};

/// Draws n points: component by weighted choice, then mean + L z with
/// L the Cholesky factor and z standard normal. Non-PD covariance is
/// rejected with std::invalid_argument.
LabeledPoints sample_mixture(const MixtureSpec& spec, int n,
                             std::uint64_t seed);

/// How class mass is spread across sites:
///   d1 - every site sees every class in equal proportion
///   d2 - sites see overlapping but unequal class mixes
///   d3 - near-equal random split without regard to class
enum class Scenario { d1, d2, d3 };

struct ScenarioSpec {
    Scenario scenario = Scenario::d1;
    int sites = 2;
    /// Per site: class id -> fraction of that class it receives.
    std::vector<std::map<int, double>> composition;

    static ScenarioSpec preset(const std::string& name);
    static std::vector<std::string> preset_names();
    static ScenarioSpec random_split(int sites);  // d3
};

/// Splits labeled points into shards per the scenario. Assignment shuffles
/// are seeded; within a shard, points keep ascending original order.
std::vector<SiteShard> partition_scenario(const Matrix& points,
                                          const std::vector<int>& labels,
                                          const ScenarioSpec& spec,
                                          std::uint64_t seed);

struct LoadOptions {
    bool has_header = false;
    std::optional<int> label_column;  // -1 = last column; nullopt = none
    bool standardize = false;
    bool map_categoricals = true;
};

struct LoadedDataset {
    Matrix points;
    std::vector<int> labels;
    bool has_labels = false;
    std::int64_t dropped_rows = 0;             // rows with missing fields
    std::vector<int> centered_only_features;   // zero variance; not scaled
};

/// Reads a whitespace- or comma-delimited numeric table. Missing values
/// (empty field or "?") drop the row; a malformed field raises
/// std::runtime_error naming the line. Categorical label columns are mapped
/// to 0,1,2,... by sorted order of the distinct strings.
LoadedDataset load_dataset(const std::filesystem::path& path,
                           const LoadOptions& opt);

/// Writes points (and labels, if present, as a final column) as
/// space-delimited text with round-trip float formatting.
void write_dataset(std::ostream& out, const Matrix& points,
                   const std::vector<int>& labels);

}  // namespace distspec
