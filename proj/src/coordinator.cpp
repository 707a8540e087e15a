#include "distspec/coordinator.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "distspec/eval.hpp"
#include "distspec/spectral.hpp"
#include "distspec/text_format.hpp"
#include "distspec/wire.hpp"

namespace distspec {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Site compress times use the calling thread's CPU clock: concurrent site
// tasks model independent machines, so a site's cost must not include time
// spent descheduled in favor of its peers. Central and populate phases are
// single-threaded and use wall time.
double thread_seconds() {
#if defined(CLOCK_THREAD_CPUTIME_ID)
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
#else
    return seconds_since(Clock::time_point{});
#endif
}

struct SiteOutcome {
    LocalCompression compression;
    double seconds = 0.0;
};

}  // namespace

PooledCodewords aggregate(const std::vector<CodebookMessage>& messages) {
    if (messages.empty()) throw std::invalid_argument("no codebooks");

    std::vector<const CodebookMessage*> order;
    order.reserve(messages.size());
    int dim = -1;
    std::set<int> seen_sites;
    std::int64_t total = 0;
    for (const auto& m : messages) {
        if (m.entries.empty())
            throw std::runtime_error("empty codebook from site " +
                                     std::to_string(m.site_id));
        if (dim < 0) dim = m.dim;
        if (m.dim != dim)
            throw std::runtime_error("codebook dimension mismatch");
        if (!seen_sites.insert(m.site_id).second)
            throw std::runtime_error("duplicate site id " +
                                     std::to_string(m.site_id));
        std::set<int> groups;
        for (const auto& e : m.entries)
            if (!groups.insert(e.group_id).second)
                throw std::runtime_error("duplicate group id in site " +
                                         std::to_string(m.site_id));
        total += static_cast<std::int64_t>(m.entries.size());
        order.push_back(&m);
    }
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return a->site_id < b->site_id; });

    PooledCodewords pool;
    pool.points.resize(total, dim);
    pool.provenance.reserve(static_cast<size_t>(total));
    pool.weights.reserve(static_cast<size_t>(total));
    Index row = 0;
    for (const auto* m : order) {
        std::vector<const CodebookEntry*> entries;
        for (const auto& e : m->entries) entries.push_back(&e);
        std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
            return a->group_id < b->group_id;
        });
        for (const auto* e : entries) {
            if (e->centroid.size() != dim)
                throw std::runtime_error("codebook dimension mismatch");
            pool.points.row(row++) = e->centroid.transpose();
            pool.provenance.emplace_back(m->site_id, e->group_id);
            pool.weights.push_back(e->weight);
        }
    }
    return pool;
}

RunResult run_distributed(const std::vector<SiteShard>& shards, int k,
                          const DmlConfig& cfg, const RunOptions& opt) {
    if (shards.empty()) throw std::invalid_argument("no shards");
    if (k < 1) throw std::invalid_argument("k must be positive");

    {
        std::set<int> ids;
        for (const auto& s : shards) {
            if (s.points.rows() == 0)
                throw std::invalid_argument("shard " + std::to_string(s.site_id) +
                                            " is empty");
            if (!ids.insert(s.site_id).second)
                throw std::invalid_argument("duplicate site id " +
                                            std::to_string(s.site_id));
            if (s.points.cols() != shards.front().points.cols())
                throw std::invalid_argument("shard dimension mismatch");
        }
    }

    // Site phase: independent concurrent compressions, each timing itself.
    std::vector<std::future<SiteOutcome>> futures;
    futures.reserve(shards.size());
    for (const auto& shard : shards)
        futures.push_back(std::async(std::launch::async, [&shard, &cfg]() {
            const double t0 = thread_seconds();
            SiteOutcome out;
            out.compression = local_compress(shard, cfg);
            out.seconds = thread_seconds() - t0;
            return out;
        }));

    std::vector<SiteOutcome> sites;
    sites.reserve(shards.size());
    for (auto& f : futures) sites.push_back(f.get());

    RunResult result;
    RunReport& rep = result.report;
    rep.mode = shards.size() == 1 ? RunMode::nondistributed : RunMode::distributed;
    rep.k = k;
    rep.dim = static_cast<int>(shards.front().points.cols());
    rep.method = cfg.method;
    rep.compression_ratio = cfg.compression_ratio;
    rep.bandwidth = opt.bandwidth;
    for (const auto& s : shards) rep.total_points += s.points.rows();
    for (const auto& s : sites) rep.site_compress_seconds.push_back(s.seconds);

    // Exchange: serialize codebooks (always, for the byte accounting); in
    // file mode they round-trip through the exchange directory.
    std::vector<CodebookMessage> messages;
    for (const auto& s : sites) {
        const auto& msg = s.compression.message;
        std::ostringstream buf;
        rep.bytes_transmitted += write_codebook(msg, buf);
        if (opt.exchange_dir) {
            const auto path = *opt.exchange_dir /
                              ("site_" + std::to_string(msg.site_id) + ".cb");
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot write " + path.string());
            f << buf.str();
            f.close();
            std::ifstream in(path);
            messages.push_back(read_codebook(in));
        } else {
            messages.push_back(msg);
        }
    }

    const auto central0 = Clock::now();
    PooledCodewords pool = aggregate(messages);
    rep.codeword_count = pool.size();
    if (static_cast<Index>(k) > pool.size())
        throw std::invalid_argument(
            "k exceeds pooled codeword count " + std::to_string(pool.size()));

    AffinityMatrix aff = gaussian_affinity(pool.points, opt.bandwidth);
    std::vector<int> codeword_labels;
    if (opt.weighted_degrees) {
        Vector w(pool.size());
        for (Index i = 0; i < pool.size(); ++i)
            w[i] = static_cast<double>(pool.weights[static_cast<size_t>(i)]);
        codeword_labels = normalized_cuts(aff, k, &w);
    } else {
        codeword_labels = normalized_cuts(aff, k);
    }

    // Route codeword labels back to their site of origin.
    std::map<int, std::map<int, int>> routed;  // site -> group -> label
    for (size_t i = 0; i < pool.provenance.size(); ++i)
        routed[pool.provenance[i].first][pool.provenance[i].second] =
            codeword_labels[i];
    rep.central_seconds = seconds_since(central0);

    if (opt.exchange_dir) {
        for (auto& [site, labels] : routed) {
            const auto path = *opt.exchange_dir /
                              ("site_" + std::to_string(site) + ".lb");
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot write " + path.string());
            rep.bytes_transmitted += write_labels(site, labels, f);
            f.close();
            std::ifstream in(path);
            LabelAssignment back = read_labels(in);
            for (const auto& s : sites)
                if (s.compression.message.site_id == site)
                    validate_label_coverage(s.compression.message, back);
            labels = back.labels;
        }
    }

    // Populate phase: per-site expansion; the slowest site gates the wall.
    double populate_max = 0.0;
    result.site_labels.reserve(shards.size());
    for (size_t s = 0; s < shards.size(); ++s) {
        const auto t0 = Clock::now();
        result.site_labels.push_back(populate_labels(
            sites[s].compression.point_to_group, routed.at(shards[s].site_id)));
        populate_max = std::max(populate_max, seconds_since(t0));
    }
    rep.populate_seconds = populate_max;

    double site_max = 0.0;
    for (double t : rep.site_compress_seconds) site_max = std::max(site_max, t);
    rep.effective_wall_seconds =
        site_max + rep.central_seconds + rep.populate_seconds;

    bool labeled = true;
    for (const auto& s : shards) labeled = labeled && !s.true_labels.empty();
    if (labeled) {
        std::vector<int> truth, pred;
        for (size_t s = 0; s < shards.size(); ++s) {
            truth.insert(truth.end(), shards[s].true_labels.begin(),
                         shards[s].true_labels.end());
            pred.insert(pred.end(), result.site_labels[s].begin(),
                        result.site_labels[s].end());
        }
        rep.accuracy = clustering_accuracy(truth, pred, k, k <= 8);
    }
    return result;
}

RunResult run_nondistributed(const Matrix& points,
                             const std::vector<int>& true_labels, int k,
                             const DmlConfig& cfg, const RunOptions& opt) {
    SiteShard shard;
    shard.site_id = 0;
    shard.points = points;
    shard.true_labels = true_labels;
    RunResult result = run_distributed({shard}, k, cfg, opt);
    result.report.mode = RunMode::nondistributed;
    return result;
}

std::string render_report(const RunReport& rep) {
    std::ostringstream out;
    out << "mode "
        << (rep.mode == RunMode::distributed ? "distributed" : "nondistributed")
        << '\n';
    out << "k " << rep.k << '\n';
    out << "total_points " << rep.total_points << '\n';
    out << "dim " << rep.dim << '\n';
    out << "method "
        << (rep.method == DmlMethod::kmeans ? "kmeans" : "rptree") << '\n';
    out << "compression_ratio " << format_double(rep.compression_ratio) << '\n';
    out << "bandwidth " << format_double(rep.bandwidth) << '\n';
    if (rep.accuracy) {
        out << (rep.mode == RunMode::distributed ? "accuracy_distributed "
                                                 : "accuracy_nondistributed ")
            << format_double(*rep.accuracy) << '\n';
    }
    out << "site_seconds";
    for (double t : rep.site_compress_seconds) out << ' ' << format_double(t);
    out << '\n';
    out << "central_seconds " << format_double(rep.central_seconds) << '\n';
    out << "populate_seconds " << format_double(rep.populate_seconds) << '\n';
    out << "effective_wall_seconds " << format_double(rep.effective_wall_seconds)
        << '\n';
    out << "codeword_count " << rep.codeword_count << '\n';
    out << "bytes_transmitted " << rep.bytes_transmitted << '\n';
    return out.str();
}

}  // namespace distspec
