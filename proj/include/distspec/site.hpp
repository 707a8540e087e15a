#pragma once
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "distspec/dml.hpp"
#include "distspec/types.hpp"

namespace distspec {

/// One site's slice of the data. true_labels may be empty (unlabeled data).
struct SiteShard {
    int site_id = 0;
    Matrix points;
    std::vector<int> true_labels;
};

/// One codeword as shipped to the coordinator.
struct CodebookEntry {
    int group_id = 0;
    std::int64_t weight = 0;  // points represented
    Vector centroid;
};

/// Everything a site sends upstream: entries ordered by ascending group_id.
struct CodebookMessage {
    int site_id = 0;
    int dim = 0;
    std::vector<CodebookEntry> entries;
};

struct LocalCompression {
    CodebookMessage message;
    std::vector<int> point_to_group;
    Grouping grouping;
};

/// Runs the configured DML on the shard. The RNG stream is derived from
/// (cfg.seed, shard.site_id) so sites are independent and reproducible
/// regardless of execution order.
LocalCompression local_compress(const SiteShard& shard, const DmlConfig& cfg);

/// Expands coordinator labels (group_id -> cluster label) back to points.
/// Throws std::runtime_error if any group a point belongs to is missing.
std::vector<int> populate_labels(std::span<const int> point_to_group,
                                 const std::map<int, int>& group_labels);

}  // namespace distspec
