#include "distspec/datagen.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "distspec/random.hpp"
#include "distspec/text_format.hpp"

namespace distspec {

Matrix MixtureSpec::ar_covariance(int dim, double rho) {
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    if (std::abs(rho) >= 1.0)
        throw std::invalid_argument("|rho| must be below 1");
    Matrix cov(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            cov(i, j) = std::pow(rho, std::abs(i - j));
    return cov;
}

MixtureSpec MixtureSpec::toy2d() {
    MixtureSpec spec;
    spec.means.resize(4, 2);
    spec.means << 2, 2, -2, -2, -2, 2, 2, -2;
    spec.covariance.resize(2, 2);
    spec.covariance << 3, 1, 1, 3;
    spec.weights.assign(4, 0.25);
    return spec;
}

MixtureSpec MixtureSpec::pattern10d(double rho) {
    MixtureSpec spec;
    spec.means = Matrix::Zero(4, 10);
    for (int i = 0; i < 4; ++i) spec.means(i, i) = 2.5;
    spec.covariance = ar_covariance(10, rho);
    spec.weights.assign(4, 0.25);
    return spec;
}

LabeledPoints sample_mixture(const MixtureSpec& spec, int n,
                             std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("negative sample count");
    if (spec.components() < 1) throw std::invalid_argument("no components");
    if (spec.covariance.rows() != spec.dim() ||
        spec.covariance.cols() != spec.dim())
        throw std::invalid_argument("covariance shape mismatch");
    if (static_cast<int>(spec.weights.size()) != spec.components())
        throw std::invalid_argument("weight count mismatch");
    double wsum = 0.0;
    for (double w : spec.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("weights must sum to 1");

    Eigen::LLT<Matrix> llt(spec.covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance not positive-definite");
    Matrix chol = llt.matrixL();

    auto rng = make_engine(seed);
    std::discrete_distribution<int> pick(spec.weights.begin(),
                                         spec.weights.end());
    std::normal_distribution<double> gauss(0.0, 1.0);

    LabeledPoints out;
    out.points.resize(n, spec.dim());
    out.labels.resize(static_cast<size_t>(n));
    Vector z(spec.dim());
    for (int i = 0; i < n; ++i) {
        const int c = pick(rng);
        out.labels[static_cast<size_t>(i)] = c;
        for (Index j = 0; j < z.size(); ++j) z[j] = gauss(rng);
        out.points.row(i) =
            spec.means.row(c) + (chol * z).transpose();
    }
    return out;
}

std::vector<std::string> ScenarioSpec::preset_names() {
    return {
        "syn-d1",           "syn-d2",           "syn-d3",
        "uci2-d1",          "uci2-d2",          "uci2-d3",
        "uci3-d1",          "uci3-d2",          "uci3-d3",
        "covertype-d1",     "covertype-d2",     "covertype-d3",
        "hepmass-2site-d1", "hepmass-2site-d2", "hepmass-2site-d3",
        "hepmass-3site-d1", "hepmass-3site-d2", "hepmass-3site-d3",
        "hepmass-4site-d1", "hepmass-4site-d2", "hepmass-4site-d3",
    };
}

ScenarioSpec ScenarioSpec::preset(const std::string& name) {
    using CompMap = std::map<int, double>;
    auto make = [](Scenario sc, std::vector<CompMap> comp) {
        ScenarioSpec s;
        s.scenario = sc;
        s.sites = static_cast<int>(comp.size());
        s.composition = std::move(comp);
        return s;
    };

    if (name == "syn-d1")
        return make(Scenario::d1, {{{0, 1.0}, {1, 1.0}}, {{2, 1.0}, {3, 1.0}}});
    if (name == "syn-d2")
        return make(Scenario::d2, {{{0, 0.5}, {1, 1.0}, {2, 0.5}},
                                   {{0, 0.5}, {2, 0.5}, {3, 1.0}}});
    if (name == "syn-d3") return random_split(2);

    if (name == "uci2-d1" || name == "hepmass-2site-d1")
        return make(Scenario::d1, {{{0, 1.0}}, {{1, 1.0}}});
    if (name == "uci2-d2" || name == "hepmass-2site-d2")
        return make(Scenario::d2,
                    {{{0, 0.7}, {1, 0.3}}, {{0, 0.3}, {1, 0.7}}});
    if (name == "uci2-d3" || name == "hepmass-2site-d3")
        return random_split(2);

    if (name == "uci3-d1")
        return make(Scenario::d1, {{{0, 1.0}}, {{1, 1.0}, {2, 1.0}}});
    if (name == "uci3-d2")
        return make(Scenario::d2, {{{0, 0.5}, {1, 1.0}}, {{0, 0.5}, {2, 1.0}}});
    if (name == "uci3-d3") return random_split(2);

    if (name == "covertype-d1")
        return make(Scenario::d1,
                    {{{1, 1.0}}, {{0, 1.0}, {2, 1.0}, {3, 1.0}, {4, 1.0}}});
    if (name == "covertype-d2")
        return make(Scenario::d2,
                    {{{0, 0.7}, {1, 0.3}, {2, 1.0}, {3, 1.0}, {4, 1.0}},
                     {{0, 0.3}, {1, 0.7}}});
    if (name == "covertype-d3") return random_split(2);

    if (name == "hepmass-3site-d1")
        return make(Scenario::d1, {{{0, 0.5}}, {{0, 0.5}}, {{1, 1.0}}});
    if (name == "hepmass-3site-d2")
        return make(Scenario::d2, {{{0, 0.50}, {1, 0.25}},
                                   {{0, 0.25}, {1, 0.25}},
                                   {{0, 0.25}, {1, 0.50}}});
    if (name == "hepmass-3site-d3") return random_split(3);

    if (name == "hepmass-4site-d1")
        return make(Scenario::d1,
                    {{{0, 0.5}}, {{0, 0.5}}, {{1, 0.5}}, {{1, 0.5}}});
    if (name == "hepmass-4site-d2")
        return make(Scenario::d2, {{{0, 0.375}, {1, 0.125}},
                                   {{0, 0.375}, {1, 0.125}},
                                   {{0, 0.125}, {1, 0.375}},
                                   {{0, 0.125}, {1, 0.375}}});
    if (name == "hepmass-4site-d3") return random_split(4);

    throw std::invalid_argument("unknown scenario preset: " + name);
}

ScenarioSpec ScenarioSpec::random_split(int sites) {
    if (sites < 1) throw std::invalid_argument("need at least one site");
    ScenarioSpec s;
    s.scenario = Scenario::d3;
    s.sites = sites;
    return s;
}

namespace {

std::vector<SiteShard> build_shards(const Matrix& points,
                                    const std::vector<int>& labels,
                                    std::vector<std::vector<Index>> member_sets) {
    std::vector<SiteShard> shards;
    shards.reserve(member_sets.size());
    for (size_t s = 0; s < member_sets.size(); ++s) {
        auto& ids = member_sets[s];
        std::sort(ids.begin(), ids.end());
        SiteShard shard;
        shard.site_id = static_cast<int>(s);
        shard.points.resize(static_cast<Index>(ids.size()), points.cols());
        if (!labels.empty()) shard.true_labels.reserve(ids.size());
        for (size_t i = 0; i < ids.size(); ++i) {
            shard.points.row(static_cast<Index>(i)) = points.row(ids[i]);
            if (!labels.empty())
                shard.true_labels.push_back(labels[static_cast<size_t>(ids[i])]);
        }
        shards.push_back(std::move(shard));
    }
    return shards;
}

}  // namespace

std::vector<SiteShard> partition_scenario(const Matrix& points,
                                          const std::vector<int>& labels,
                                          const ScenarioSpec& spec,
                                          std::uint64_t seed) {
    const Index n = points.rows();
    if (spec.sites < 1) throw std::invalid_argument("need at least one site");
    if (!labels.empty() && static_cast<Index>(labels.size()) != n)
        throw std::invalid_argument("label count mismatch");

    if (spec.scenario == Scenario::d3) {
        std::vector<Index> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        auto rng = make_engine(seed);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::vector<Index>> members(
            static_cast<size_t>(spec.sites));
        const Index base = n / spec.sites;
        const Index extra = n % spec.sites;
        size_t pos = 0;
        for (int s = 0; s < spec.sites; ++s) {
            const Index take = base + (s < extra ? 1 : 0);
            members[static_cast<size_t>(s)].assign(
                order.begin() + static_cast<std::ptrdiff_t>(pos),
                order.begin() + static_cast<std::ptrdiff_t>(pos + take));
            pos += static_cast<size_t>(take);
        }
        return build_shards(points, labels, std::move(members));
    }

    if (spec.sites < 2)
        throw std::invalid_argument("component scenarios need at least 2 sites");
    if (labels.empty())
        throw std::invalid_argument("component scenarios require labels");
    if (static_cast<int>(spec.composition.size()) != spec.sites)
        throw std::invalid_argument("composition size differs from site count");

    // Components referenced by the spec, by rank of the distinct label value.
    std::vector<int> distinct(labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());

    std::set<int> named;
    for (const auto& site : spec.composition)
        for (const auto& [comp, frac] : site) {
            if (!(frac > 0.0) || frac > 1.0 + 1e-9)
                throw std::invalid_argument("component fraction out of range");
            named.insert(comp);
        }
    for (int comp : named) {
        if (comp < 0 || comp >= static_cast<int>(distinct.size()))
            throw std::invalid_argument("component " + std::to_string(comp) +
                                        " absent from data");
        double sum = 0.0;
        for (const auto& site : spec.composition) {
            auto it = site.find(comp);
            if (it != site.end()) sum += it->second;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("fractions for component " +
                                        std::to_string(comp) +
                                        " do not sum to 1");
    }
    for (size_t i = 0; i < distinct.size(); ++i)
        if (!named.count(static_cast<int>(i)))
            throw std::invalid_argument("data component " + std::to_string(i) +
                                        " not routed by scenario");

    std::vector<std::vector<Index>> members(static_cast<size_t>(spec.sites));
    for (size_t rank = 0; rank < distinct.size(); ++rank) {
        std::vector<Index> pool;
        for (Index i = 0; i < n; ++i)
            if (labels[static_cast<size_t>(i)] == distinct[rank])
                pool.push_back(i);
        auto rng = make_engine(
            derive_stream_seed(seed, static_cast<std::uint64_t>(rank)));
        std::shuffle(pool.begin(), pool.end(), rng);

        // Cumulative-rounding slice boundaries keep every site within one
        // point of its exact fractional share.
        double cum = 0.0;
        size_t start = 0;
        for (int s = 0; s < spec.sites; ++s) {
            auto it = spec.composition[static_cast<size_t>(s)].find(
                static_cast<int>(rank));
            if (it == spec.composition[static_cast<size_t>(s)].end()) continue;
            cum += it->second;
            const size_t stop = static_cast<size_t>(
                std::llround(cum * static_cast<double>(pool.size())));
            for (size_t i = start; i < stop && i < pool.size(); ++i)
                members[static_cast<size_t>(s)].push_back(pool[i]);
            start = stop;
        }
    }
    return build_shards(points, labels, std::move(members));
}

namespace {

std::vector<std::string> split_fields(const std::string& line, bool comma) {
    std::vector<std::string> out;
    if (comma) {
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) {
            const auto b = field.find_first_not_of(" \t");
            if (b == std::string::npos) {
                out.emplace_back();
            } else {
                const auto e = field.find_last_not_of(" \t");
                out.push_back(field.substr(b, e - b + 1));
            }
        }
        if (!line.empty() && line.back() == ',') out.emplace_back();
    } else {
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
    }
    return out;
}

bool is_missing(const std::string& field) {
    return field.empty() || field == "?";
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& path,
                           const LoadOptions& opt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::vector<std::string>> rows;
    std::string line;
    int lineno = 0;
    bool comma = false;
    bool sniffed = false;
    bool header_pending = opt.has_header;
    int width = -1;
    LoadedDataset out;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (!sniffed) {
            comma = line.find(',') != std::string::npos;
            sniffed = true;
        }
        auto fields = split_fields(line, comma);
        if (width < 0) width = static_cast<int>(fields.size());
        if (static_cast<int>(fields.size()) != width)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(width) +
                                     " fields, got " +
                                     std::to_string(fields.size()));
        bool missing = false;
        for (const auto& f : fields) missing = missing || is_missing(f);
        if (missing) {
            ++out.dropped_rows;
            continue;
        }
        rows.push_back(std::move(fields));
        rows.back().push_back(std::to_string(lineno));  // provenance
    }
    if (width < 0) width = 0;

    int label_col = -1;
    if (opt.label_column) {
        label_col = *opt.label_column;
        if (label_col == -1) label_col = width - 1;
        if (label_col < 0 || label_col >= width)
            throw std::invalid_argument("label column out of range");
        out.has_labels = true;
    }

    const int feat_count = width - (out.has_labels ? 1 : 0);
    out.points.resize(static_cast<Index>(rows.size()), feat_count);

    std::vector<std::string> raw_labels;
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        const std::string& src_line = fields.back();
        int c = 0;
        for (int f = 0; f < width; ++f) {
            if (f == label_col) {
                raw_labels.push_back(fields[static_cast<size_t>(f)]);
                continue;
            }
            double v;
            if (!parse_double(fields[static_cast<size_t>(f)], v))
                throw std::runtime_error("line " + src_line +
                                         ": unparsable value '" +
                                         fields[static_cast<size_t>(f)] + "'");
            out.points(static_cast<Index>(r), c++) = v;
        }
    }

    if (out.has_labels) {
        bool all_int = true;
        std::vector<long long> numeric(raw_labels.size());
        for (size_t i = 0; i < raw_labels.size() && all_int; ++i)
            all_int = parse_long(raw_labels[i], numeric[i]);
        if (all_int) {
            out.labels.reserve(raw_labels.size());
            for (long long v : numeric)
                out.labels.push_back(static_cast<int>(v));
        } else if (opt.map_categoricals) {
            std::vector<std::string> distinct(raw_labels);
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()),
                           distinct.end());
            std::map<std::string, int> code;
            for (size_t i = 0; i < distinct.size(); ++i)
                code[distinct[i]] = static_cast<int>(i);
            out.labels.reserve(raw_labels.size());
            for (const auto& s : raw_labels) out.labels.push_back(code[s]);
        } else {
            throw std::runtime_error(
                "non-integer labels require categorical mapping");
        }
    }

    if (opt.standardize && out.points.rows() > 0) {
        for (Index j = 0; j < out.points.cols(); ++j) {
            const double mean = out.points.col(j).mean();
            out.points.col(j).array() -= mean;
            const double sd = std::sqrt(out.points.col(j).squaredNorm() /
                                        static_cast<double>(out.points.rows()));
            if (sd < 1e-12) {
                out.centered_only_features.push_back(static_cast<int>(j));
                std::cerr << "warning: feature " << j
                          << " has zero variance; centered only\n";
            } else {
                out.points.col(j) /= sd;
            }
        }
    }
    return out;
}

void write_dataset(std::ostream& out, const Matrix& points,
                   const std::vector<int>& labels) {
    if (!labels.empty() &&
        static_cast<Index>(labels.size()) != points.rows())
        throw std::invalid_argument("label count mismatch");
    for (Index i = 0; i < points.rows(); ++i) {
        for (Index j = 0; j < points.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(points(i, j));
        }
        if (!labels.empty()) {
            if (points.cols() > 0) out << ' ';
            out << labels[static_cast<size_t>(i)];
        }
        out << '\n';
    }
}

}  // namespace distspec
