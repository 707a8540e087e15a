#include "distspec/site.hpp"

#include <stdexcept>

#include "distspec/random.hpp"

namespace distspec {

LocalCompression local_compress(const SiteShard& shard, const DmlConfig& cfg) {
    if (shard.site_id < 0) throw std::invalid_argument("negative site id");
    if (shard.points.rows() == 0)
        throw std::invalid_argument("empty shard");
    if (!shard.true_labels.empty() &&
        static_cast<Index>(shard.true_labels.size()) != shard.points.rows())
        throw std::invalid_argument("label count mismatch");

    DmlConfig local = cfg;
    local.seed = derive_stream_seed(cfg.seed,
                                    static_cast<std::uint64_t>(shard.site_id));

    LocalCompression out;
    out.grouping = compress(shard.points, local);
    out.point_to_group = out.grouping.assignment;

    out.message.site_id = shard.site_id;
    out.message.dim = static_cast<int>(shard.points.cols());
    const int groups = out.grouping.group_count();
    out.message.entries.reserve(static_cast<size_t>(groups));
    for (int g = 0; g < groups; ++g) {
        CodebookEntry e;
        e.group_id = g;
        e.weight = out.grouping.sizes[static_cast<size_t>(g)];
        e.centroid = out.grouping.centroids.row(g).transpose();
        out.message.entries.push_back(std::move(e));
    }
    return out;
}

std::vector<int> populate_labels(std::span<const int> point_to_group,
                                 const std::map<int, int>& group_labels) {
    std::vector<int> labels;
    labels.reserve(point_to_group.size());
    for (int g : point_to_group) {
        auto it = group_labels.find(g);
        if (it == group_labels.end())
            throw std::runtime_error("no label for group " + std::to_string(g));
        labels.push_back(it->second);
    }
    return labels;
}

}  // namespace distspec
