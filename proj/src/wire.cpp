#include "distspec/wire.hpp"

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "distspec/text_format.hpp"

namespace distspec {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

[[noreturn]] void bad_line(int lineno, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": " + what);
}

bool next_line(std::istream& in, std::string& line, int& lineno) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    return true;
}

long long parse_int_field(std::string_view tok, int lineno,
                          const char* what) {
    long long v;
    if (!parse_long(tok, v)) bad_line(lineno, std::string("bad ") + what);
    return v;
}

}  // namespace

std::int64_t write_codebook(const CodebookMessage& msg, std::ostream& out) {
    if (msg.entries.empty())
        throw std::invalid_argument("refusing to write empty codebook");
    if (msg.site_id < 0) throw std::invalid_argument("negative site id");
    if (msg.dim < 1) throw std::invalid_argument("bad dimension");

    std::ostringstream buf;
    buf << "DISTSPEC-CB 1 " << msg.site_id << ' ' << msg.entries.size() << ' '
        << msg.dim << '\n';
    for (const auto& e : msg.entries) {
        if (e.centroid.size() != msg.dim)
            throw std::invalid_argument("centroid dimension mismatch");
        buf << e.group_id << ' ' << e.weight;
        for (Index j = 0; j < e.centroid.size(); ++j)
            buf << ' ' << format_double(e.centroid[j]);
        buf << '\n';
    }
    const std::string text = buf.str();
    out << text;
    return static_cast<std::int64_t>(text.size());
}

CodebookMessage read_codebook(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!next_line(in, line, lineno))
        throw std::runtime_error("empty codebook stream");

    auto head = split_ws(line);
    if (head.size() != 5 || head[0] != "DISTSPEC-CB")
        bad_line(lineno, "expected codebook header");
    if (head[1] != "1") bad_line(lineno, "unsupported version");

    CodebookMessage msg;
    msg.site_id = static_cast<int>(parse_int_field(head[2], lineno, "site id"));
    const long long count = parse_int_field(head[3], lineno, "entry count");
    msg.dim = static_cast<int>(parse_int_field(head[4], lineno, "dimension"));
    if (msg.site_id < 0) bad_line(lineno, "negative site id");
    if (count < 1) bad_line(lineno, "entry count must be positive");
    if (msg.dim < 1) bad_line(lineno, "dimension must be positive");

    msg.entries.reserve(static_cast<size_t>(count));
    for (long long r = 0; r < count; ++r) {
        if (!next_line(in, line, lineno))
            throw std::runtime_error("truncated codebook: expected " +
                                     std::to_string(count) + " entries");
        auto toks = split_ws(line);
        if (toks.size() != static_cast<size_t>(2 + msg.dim))
            bad_line(lineno, "wrong field count");
        CodebookEntry e;
        e.group_id =
            static_cast<int>(parse_int_field(toks[0], lineno, "group id"));
        e.weight = parse_int_field(toks[1], lineno, "weight");
        if (e.weight < 1) bad_line(lineno, "weight must be positive");
        e.centroid.resize(msg.dim);
        for (int j = 0; j < msg.dim; ++j) {
            double v;
            if (!parse_double(toks[static_cast<size_t>(2 + j)], v))
                bad_line(lineno, "bad centroid value");
            e.centroid[j] = v;
        }
        msg.entries.push_back(std::move(e));
    }
    return msg;
}

std::int64_t write_labels(int site_id, const std::map<int, int>& labels,
                          std::ostream& out) {
    if (labels.empty())
        throw std::invalid_argument("refusing to write empty label map");
    if (site_id < 0) throw std::invalid_argument("negative site id");

    std::ostringstream buf;
    buf << "DISTSPEC-LB 1 " << site_id << ' ' << labels.size() << '\n';
    for (const auto& [group, label] : labels)
        buf << group << ' ' << label << '\n';
    const std::string text = buf.str();
    out << text;
    return static_cast<std::int64_t>(text.size());
}

LabelAssignment read_labels(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!next_line(in, line, lineno))
        throw std::runtime_error("empty label stream");

    auto head = split_ws(line);
    if (head.size() != 4 || head[0] != "DISTSPEC-LB")
        bad_line(lineno, "expected label header");
    if (head[1] != "1") bad_line(lineno, "unsupported version");

    LabelAssignment out;
    out.site_id = static_cast<int>(parse_int_field(head[2], lineno, "site id"));
    const long long count = parse_int_field(head[3], lineno, "count");
    if (out.site_id < 0) bad_line(lineno, "negative site id");
    if (count < 1) bad_line(lineno, "count must be positive");

    for (long long r = 0; r < count; ++r) {
        if (!next_line(in, line, lineno))
            throw std::runtime_error("truncated label block: expected " +
                                     std::to_string(count) + " rows");
        auto toks = split_ws(line);
        if (toks.size() != 2) bad_line(lineno, "wrong field count");
        const int group =
            static_cast<int>(parse_int_field(toks[0], lineno, "group id"));
        const int label =
            static_cast<int>(parse_int_field(toks[1], lineno, "label"));
        if (!out.labels.emplace(group, label).second)
            bad_line(lineno, "duplicate group id");
    }
    return out;
}

void validate_label_coverage(const CodebookMessage& codebook,
                             const LabelAssignment& assignment) {
    if (codebook.site_id != assignment.site_id)
        throw std::runtime_error("site id mismatch");
    if (codebook.entries.size() != assignment.labels.size())
        throw std::runtime_error("label count differs from codebook");
    for (const auto& e : codebook.entries)
        if (!assignment.labels.count(e.group_id))
            throw std::runtime_error("no label for group " +
                                     std::to_string(e.group_id));
}

}  // namespace distspec
