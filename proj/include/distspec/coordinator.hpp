#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distspec/dml.hpp"
#include "distspec/site.hpp"
#include "distspec/types.hpp"

namespace distspec {

/// Codewords pooled across sites, rows ordered by (site_id, group_id).
struct PooledCodewords {
    Matrix points;
    std::vector<std::pair<int, int>> provenance;  // (site_id, group_id)
    std::vector<std::int64_t> weights;

    Index size() const { return points.rows(); }
};

/// Merges codebook messages; duplicate site ids or group ids within a site
/// are rejected with std::runtime_error, as are dimension mismatches.
PooledCodewords aggregate(const std::vector<CodebookMessage>& messages);

enum class RunMode { distributed, nondistributed };

struct RunReport {
    RunMode mode = RunMode::distributed;
    int k = 0;
    std::int64_t total_points = 0;
    int dim = 0;
    DmlMethod method = DmlMethod::kmeans;
    double compression_ratio = 0.0;
    double bandwidth = 0.0;
    std::optional<double> accuracy;
    std::vector<double> site_compress_seconds;
    double central_seconds = 0.0;
    double populate_seconds = 0.0;
    double effective_wall_seconds = 0.0;  // max(site) + central + populate
    std::int64_t codeword_count = 0;
    std::int64_t bytes_transmitted = 0;
};

struct RunOptions {
    double bandwidth = 1.0;
    bool weighted_degrees = false;  // scale codeword degrees by weight
    std::optional<std::filesystem::path> exchange_dir;  // serialize messages
};

struct RunResult {
    std::vector<std::vector<int>> site_labels;  // per shard, per point
    RunReport report;
};

/// Full distributed pipeline: compress each shard concurrently, pool the
/// codebooks, run recursive normalized cuts on the codewords, route labels
/// back by provenance and populate them at each site. Accuracy is filled in
/// when every shard carries true labels.
RunResult run_distributed(const std::vector<SiteShard>& shards, int k,
                          const DmlConfig& cfg, const RunOptions& opt);

/// Single-site baseline: the same pipeline applied to all points as one
/// shard (site_id 0).
RunResult run_nondistributed(const Matrix& points,
                             const std::vector<int>& true_labels, int k,
                             const DmlConfig& cfg, const RunOptions& opt);

/// Stable text rendering of a report as "key value" lines.
std::string render_report(const RunReport& report);

}  // namespace distspec
