#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>

#include "distspec/site.hpp"

namespace distspec {

/// Serializes a codebook message; returns the byte count written.
/// Layout: header "DISTSPEC-CB 1 <site_id> <n_entries> <dim>", then one
/// line per entry: "<group_id> <weight> <c_1> ... <c_dim>". An empty
/// codebook is rejected.
std::int64_t write_codebook(const CodebookMessage& msg, std::ostream& out);

/// Parses a codebook message; malformed input raises std::runtime_error
/// with the offending line number.
CodebookMessage read_codebook(std::istream& in);

/// Label assignments for one site's groups.
struct LabelAssignment {
    int site_id = 0;
    std::map<int, int> labels;  // group_id -> cluster label
};

/// Layout: header "DISTSPEC-LB 1 <site_id> <count>", then one line per
/// group: "<group_id> <label>". An empty map is rejected.
std::int64_t write_labels(int site_id, const std::map<int, int>& labels,
                          std::ostream& out);

LabelAssignment read_labels(std::istream& in);

/// Checks that an assignment covers exactly the groups of a codebook from
/// the same site; any mismatch raises std::runtime_error.
void validate_label_coverage(const CodebookMessage& codebook,
                             const LabelAssignment& assignment);

}  // namespace distspec
