#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "distspec/coordinator.hpp"
#include "distspec/datagen.hpp"
#include "distspec/eval.hpp"
#include "distspec/random.hpp"
#include "distspec/spectral.hpp"
#include "distspec/text_format.hpp"
#include "distspec/wire.hpp"

namespace fs = std::filesystem;
using namespace distspec;

namespace {

// ---------------------------------------------------------------- helpers

/// Opens the report sink: --out path or standard output.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

MixtureSpec make_mixture(const std::string& preset, double rho) {
    if (preset == "toy2d") return MixtureSpec::toy2d();
    if (preset == "mix10d") return MixtureSpec::pattern10d(rho);
    throw std::invalid_argument("unknown mixture preset: " + preset +
                                " (expected toy2d or mix10d)");
}

LoadedDataset load_points_file(const fs::path& path, bool header,
                               bool no_labels, int label_col,
                               bool standardize) {
    LoadOptions opt;
    opt.has_header = header;
    if (!no_labels) opt.label_column = label_col;
    opt.standardize = standardize;
    return load_dataset(path, opt);
}

/// Median pairwise distance on a deterministic subsample (stride-based) of
/// at most 2000 rows; the default bandwidth when none is requested.
double median_heuristic(const Matrix& points) {
    const Index n = points.rows();
    const Index cap = 2000;
    if (n <= cap) return median_pairwise_distance(points);
    const Index stride = (n + cap - 1) / cap;
    Matrix sub((n + stride - 1) / stride, points.cols());
    Index r = 0;
    for (Index i = 0; i < n; i += stride) sub.row(r++) = points.row(i);
    return median_pairwise_distance(sub.topRows(r));
}

/// Best-accuracy bandwidth for the pipeline: compress once per shard, then
/// sweep the central clustering over the grid. Requires true labels.
double tune_bandwidth(const std::vector<SiteShard>& shards, int k,
                      const DmlConfig& cfg, const std::vector<double>& grid,
                      bool weighted) {
    for (const auto& s : shards)
        if (s.true_labels.empty())
            throw std::invalid_argument(
                "bandwidth grid search needs labeled input; pass an explicit "
                "--bandwidth or rely on the median heuristic");

    std::vector<LocalCompression> locals;
    std::vector<CodebookMessage> messages;
    for (const auto& s : shards) {
        locals.push_back(local_compress(s, cfg));
        messages.push_back(locals.back().message);
    }
    PooledCodewords pool = aggregate(messages);
    if (static_cast<Index>(k) > pool.size())
        throw std::invalid_argument("k exceeds pooled codeword count " +
                                    std::to_string(pool.size()));

    std::vector<int> truth;
    for (const auto& s : shards)
        truth.insert(truth.end(), s.true_labels.begin(), s.true_labels.end());

    double best_sigma = 0.0;
    double best_acc = -1.0;
    for (double sigma : grid) {
        std::vector<int> codeword_labels;
        try {
            AffinityMatrix aff = gaussian_affinity(pool.points, sigma);
            if (weighted) {
                Vector w(pool.size());
                for (Index i = 0; i < pool.size(); ++i)
                    w[i] = static_cast<double>(pool.weights[static_cast<size_t>(i)]);
                codeword_labels = normalized_cuts(aff, k, &w);
            } else {
                codeword_labels = normalized_cuts(aff, k);
            }
        } catch (const DegenerateSpectrumError&) {
            continue;  // unusable bandwidth; try the next one
        }
        std::map<int, std::map<int, int>> routed;
        for (size_t i = 0; i < pool.provenance.size(); ++i)
            routed[pool.provenance[i].first][pool.provenance[i].second] =
                codeword_labels[i];
        std::vector<int> pred;
        for (size_t s = 0; s < shards.size(); ++s) {
            auto labels = populate_labels(locals[s].point_to_group,
                                          routed.at(shards[s].site_id));
            pred.insert(pred.end(), labels.begin(), labels.end());
        }
        const double acc = clustering_accuracy(truth, pred, k, k <= 8);
        if (acc > best_acc) {  // ties keep the smallest bandwidth
            best_acc = acc;
            best_sigma = sigma;
        }
    }
    if (best_acc < 0.0)
        throw std::runtime_error("no usable bandwidth in the grid");
    return best_sigma;
}

// ------------------------------------------------------------ subcommands

struct GenArgs {
    std::string preset = "toy2d";
    double rho = 0.3;
    int n = 4000;
    std::uint64_t seed = 1;
    std::string out;
};

int run_gen(const GenArgs& a) {
    auto data = sample_mixture(make_mixture(a.preset, a.rho), a.n, a.seed);
    Sink sink(a.out);
    write_dataset(sink.stream(), data.points, data.labels);
    return 0;
}

struct SplitArgs {
    std::string in;
    std::string scenario;
    int sites = 0;  // 0 = scenario default
    std::uint64_t seed = 1;
    std::string outdir;
    bool no_labels = false;
    bool header = false;
};

int run_split(const SplitArgs& a) {
    ScenarioSpec spec;
    if (a.scenario == "d3") {
        spec = ScenarioSpec::random_split(a.sites > 0 ? a.sites : 2);
    } else {
        spec = ScenarioSpec::preset(a.scenario);
        if (a.sites > 0 && a.sites != spec.sites)
            throw std::invalid_argument(
                "--sites conflicts with the preset's site count (" +
                std::to_string(spec.sites) + ")");
    }

    auto ds = load_points_file(a.in, a.header, a.no_labels, -1, false);
    auto shards = partition_scenario(ds.points, ds.labels, spec, a.seed);

    fs::create_directories(a.outdir);
    for (const auto& shard : shards) {
        const fs::path path =
            fs::path(a.outdir) / ("shard_" + std::to_string(shard.site_id) + ".txt");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        write_dataset(out, shard.points, shard.true_labels);
        std::cerr << path.string() << ": " << shard.points.rows() << " points\n";
    }
    return 0;
}

struct RunArgs {
    std::vector<std::string> files;
    int k = 0;
    std::string dml = "kmeans";
    double ratio = 40.0;
    int max_iter = 100;
    std::uint64_t seed = 1;
    double bandwidth = 0.0;
    bool bandwidth_set = false;
    bool grid = false;
    bool full_grid = false;
    bool compare = false;
    bool weighted = false;
    std::string exchange_dir;
    bool no_labels = false;
    int label_col = -1;
    bool header = false;
    bool standardize = false;
    std::string out;
};

int run_run(const RunArgs& a) {
    DmlConfig cfg;
    cfg.method = a.dml == "rptree" ? DmlMethod::rptree : DmlMethod::kmeans;
    cfg.compression_ratio = a.ratio;
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;

    std::vector<SiteShard> shards;
    for (size_t i = 0; i < a.files.size(); ++i) {
        auto ds = load_points_file(a.files[i], a.header, a.no_labels,
                                   a.label_col, a.standardize);
        SiteShard shard;
        shard.site_id = static_cast<int>(i);
        shard.points = std::move(ds.points);
        if (ds.has_labels) shard.true_labels = std::move(ds.labels);
        shards.push_back(std::move(shard));
    }

    Matrix all_points;
    std::vector<int> all_labels;
    bool labeled = true;
    for (const auto& s : shards) labeled = labeled && !s.true_labels.empty();
    {
        Index total = 0;
        for (const auto& s : shards) total += s.points.rows();
        all_points.resize(total, shards.front().points.cols());
        Index row = 0;
        for (const auto& s : shards) {
            all_points.middleRows(row, s.points.rows()) = s.points;
            row += s.points.rows();
            if (labeled)
                all_labels.insert(all_labels.end(), s.true_labels.begin(),
                                  s.true_labels.end());
        }
    }

    RunOptions opt;
    opt.weighted_degrees = a.weighted;
    if (!a.exchange_dir.empty()) {
        fs::create_directories(a.exchange_dir);
        opt.exchange_dir = fs::path(a.exchange_dir);
    }

    std::vector<double> grid;
    if (a.grid) grid = BandwidthGrid::log_spaced(0.1, 10.0, 9).values;
    if (a.full_grid) grid = BandwidthGrid::full().values;

    Sink sink(a.out);
    auto pick_bandwidth = [&](const std::vector<SiteShard>& target) {
        if (a.bandwidth_set) return a.bandwidth;
        if (!grid.empty()) return tune_bandwidth(target, a.k, cfg, grid, a.weighted);
        return median_heuristic(all_points);
    };

    auto whole_as_shard = [&]() {
        SiteShard s;
        s.site_id = 0;
        s.points = all_points;
        if (labeled) s.true_labels = all_labels;
        return std::vector<SiteShard>{s};
    };

    opt.bandwidth = pick_bandwidth(shards);
    RunResult main_run = run_distributed(shards, a.k, cfg, opt);
    sink.stream() << render_report(main_run.report);

    if (a.compare) {
        RunOptions base_opt = opt;
        base_opt.exchange_dir.reset();
        base_opt.bandwidth = pick_bandwidth(whole_as_shard());
        RunResult base =
            run_nondistributed(all_points, all_labels, a.k, cfg, base_opt);
        sink.stream() << render_report(base.report);
        auto cmp = compare_runs(main_run.report, base.report);
        sink.stream() << "accuracy_delta " << format_double(cmp.accuracy_delta)
                      << '\n'
                      << "speedup " << format_double(cmp.speedup) << '\n';
    }
    return 0;
}

struct Lemma1Args {
    int trials = 100;
    int n = 200;
    double sigma_eps = 0.01;
    double bandwidth = 2.0;
    std::uint64_t seed = 7;
    std::string out;
};

Matrix lemma1_blobs(int n, std::uint64_t seed) {
    auto rng = make_engine(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix pts(n, 2);
    for (Index i = 0; i < pts.rows(); ++i) {
        pts(i, 0) = (i < pts.rows() / 2 ? 0.0 : 6.0) + g(rng);
        pts(i, 1) = g(rng);
    }
    return pts;
}

int run_lemma1(const Lemma1Args& a) {
    if (a.trials < 1) throw std::invalid_argument("need at least one trial");
    if (a.n < 4 || a.n > 500)
        throw std::invalid_argument("n must lie in [4, 500]");

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "trial rho eig_dist_sq frob_sq middle outer\n";
    int middle = 0, outer = 0;
    for (int t = 0; t < a.trials; ++t) {
        auto pts = lemma1_blobs(a.n, derive_stream_seed(a.seed, static_cast<std::uint64_t>(t)));
        auto rep = lemma1_check(pts, a.bandwidth,
                                PerturbationSpec::from_sigma(a.sigma_eps),
                                derive_stream_seed(a.seed + 4, static_cast<std::uint64_t>(t)));
        middle += rep.middle_holds ? 1 : 0;
        outer += rep.outer_holds ? 1 : 0;
        os << t << ' ' << format_double(rep.rho) << ' '
           << format_double(rep.eig_dist_sq) << ' '
           << format_double(rep.frob_sq) << ' ' << (rep.middle_holds ? 1 : 0)
           << ' ' << (rep.outer_holds ? 1 : 0) << '\n';
    }
    os << "middle_holds " << middle << "/" << a.trials << '\n';
    os << "outer_holds " << outer << "/" << a.trials << '\n';
    return 0;
}

struct SlopeArgs {
    int d = 2;
    int n = 5000;
    int seeds = 10;
    std::string out;
};

int run_slope(const SlopeArgs& a) {
    if (a.seeds < 1) throw std::invalid_argument("need at least one seed");
    if (a.d < 1) throw std::invalid_argument("dimension must be positive");
    if (a.n < 1) throw std::invalid_argument("n must be positive");

    const std::vector<int> ks = {16, 32, 64, 128, 256};
    Sink sink(a.out);
    auto& os = sink.stream();
    os << "k rate mean_mse\n";
    std::vector<double> log_k, log_mse;
    for (int k : ks) {
        double total = 0.0;
        for (int s = 1; s <= a.seeds; ++s) {
            auto rng = make_engine(
                derive_stream_seed(static_cast<std::uint64_t>(s), 99));
            std::normal_distribution<double> g(0.0, 1.0);
            Matrix pts(a.n, a.d);
            for (Index i = 0; i < pts.rows(); ++i)
                for (Index j = 0; j < pts.cols(); ++j) pts(i, j) = g(rng);
            auto grouping =
                kmeans(pts, k, 100, static_cast<std::uint64_t>(s));
            total += distortion(pts, grouping).mse;
        }
        const double mean_mse = total / a.seeds;
        os << k << ' ' << format_double(std::log2(static_cast<double>(k)))
           << ' ' << format_double(mean_mse) << '\n';
        log_k.push_back(std::log2(static_cast<double>(k)));
        log_mse.push_back(std::log2(mean_mse));
    }
    os << "slope " << format_double(fitted_slope(log_k, log_mse)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed spectral clustering over compressed codewords"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd =
        app.add_subcommand("gen", "Sample a Gaussian mixture to a labeled file");
    gen_cmd->add_option("--preset", gen.preset,
                        "Mixture preset: toy2d or mix10d")
        ->capture_default_str();
    auto* rho_opt = gen_cmd->add_option(
        "--rho", gen.rho, "AR(1) covariance parameter (mix10d only)");
    gen_cmd->add_option("--n", gen.n, "Number of points")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Sampling seed")
        ->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

    SplitArgs split;
    auto* split_cmd =
        app.add_subcommand("split", "Partition a dataset into site shards");
    split_cmd->add_option("--in", split.in, "Input points file")->required();
    split_cmd
        ->add_option("--scenario", split.scenario,
                     "Scenario preset name, or d3 for a random split")
        ->required();
    split_cmd->add_option("--sites", split.sites,
                          "Site count (d3 only; presets fix their own)");
    split_cmd->add_option("--seed", split.seed, "Shuffle seed")
        ->capture_default_str();
    split_cmd->add_option("--outdir", split.outdir, "Shard output directory")
        ->required();
    split_cmd->add_flag("--no-labels", split.no_labels,
                        "Input has no label column");
    split_cmd->add_flag("--header", split.header, "Skip a header row");

    RunArgs run;
    auto* run_cmd = app.add_subcommand(
        "run", "Cluster shard files (one file = single-site baseline)");
    run_cmd->add_option("files", run.files, "Shard files, one per site")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--k", run.k, "Number of clusters")
        ->required()
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--dml", run.dml, "Local compression: kmeans or rptree")
        ->capture_default_str()
        ->check(CLI::IsMember({"kmeans", "rptree"}));
    run_cmd->add_option("--ratio", run.ratio, "Compression ratio (points per codeword)")
        ->capture_default_str();
    run_cmd->add_option("--max-iter", run.max_iter, "Lloyd iteration cap")
        ->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Per-site stream seed base")
        ->capture_default_str();
    auto* bw = run_cmd->add_option("--bandwidth", run.bandwidth,
                                   "Gaussian kernel bandwidth");
    auto* grid_flag = run_cmd->add_flag(
        "--grid", run.grid, "Tune bandwidth over 9 log-spaced values");
    auto* full_flag = run_cmd->add_flag(
        "--full-grid", run.full_grid,
        "Tune bandwidth over the full fine grid (0.01 steps to 1, 0.1 to 200)");
    bw->excludes(grid_flag)->excludes(full_flag);
    grid_flag->excludes(full_flag);
    run_cmd->add_flag("--compare", run.compare,
                      "Also run the single-site baseline and report deltas");
    run_cmd->add_flag("--weighted-degrees", run.weighted,
                      "Scale codeword degrees by their weights");
    run_cmd->add_option("--exchange-dir", run.exchange_dir,
                        "Round-trip codebooks and labels through files here");
    run_cmd->add_flag("--no-labels", run.no_labels, "Inputs have no label column");
    run_cmd->add_option("--label-col", run.label_col,
                        "Label column index (-1 = last)")
        ->capture_default_str();
    run_cmd->add_flag("--header", run.header, "Skip a header row");
    run_cmd->add_flag("--standardize", run.standardize,
                      "Standardize features to mean 0, deviation 1");
    run_cmd->add_option("--out", run.out, "Report file (default stdout)");

    auto* check_cmd = app.add_subcommand("check", "Theory harness batteries");
    check_cmd->require_subcommand(1);

    Lemma1Args lemma;
    auto* lemma_cmd = check_cmd->add_subcommand(
        "lemma1", "Perturbation stability of the spectral bipartition");
    lemma_cmd->add_option("--trials", lemma.trials, "Trial count")
        ->capture_default_str();
    lemma_cmd->add_option("--n", lemma.n, "Points per trial")
        ->capture_default_str();
    lemma_cmd->add_option("--sigma-eps", lemma.sigma_eps,
                          "Perturbation standard deviation")
        ->capture_default_str();
    lemma_cmd->add_option("--bandwidth", lemma.bandwidth, "Kernel bandwidth")
        ->capture_default_str();
    lemma_cmd->add_option("--seed", lemma.seed, "Battery seed")
        ->capture_default_str();
    lemma_cmd->add_option("--out", lemma.out, "Report file (default stdout)");

    SlopeArgs slope;
    auto* slope_cmd = check_cmd->add_subcommand(
        "distortion-slope", "Distortion-rate scaling of the quantizer");
    slope_cmd->add_option("--d", slope.d, "Data dimension")
        ->capture_default_str();
    slope_cmd->add_option("--n", slope.n, "Points per run")
        ->capture_default_str();
    slope_cmd->add_option("--seeds", slope.seeds, "Seed count")
        ->capture_default_str();
    slope_cmd->add_option("--out", slope.out, "Report file (default stdout)");

    try {
        app.parse(argc, argv);
        if (*gen_cmd) {
            if (*rho_opt && gen.preset != "mix10d")
                throw std::invalid_argument("--rho applies only to mix10d");
            return run_gen(gen);
        }
        if (*split_cmd) return run_split(split);
        if (*run_cmd) {
            run.bandwidth_set = bw->count() > 0;
            return run_run(run);
        }
        if (*lemma_cmd) return run_lemma1(lemma);
        if (*slope_cmd) return run_slope(slope);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
