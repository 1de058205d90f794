#include "eas/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "eas/csv.hpp"
#include "eas/error.hpp"
#include "eas/rng.hpp"

namespace eas {

void validate(const ManifoldSpec& spec) {
    if (spec.intrinsic_dim == 0) {
        throw ConfigError("manifold: intrinsic_dim must be positive");
    }
    if (spec.ambient_dim <= spec.intrinsic_dim) {
        throw ConfigError("manifold: ambient_dim must exceed intrinsic_dim");
    }
    if (spec.embedding == EmbeddingKind::circle && spec.intrinsic_dim != 1) {
        throw ConfigError("manifold: circle embedding requires intrinsic_dim 1");
    }
    if (spec.embedding == EmbeddingKind::random_trig) {
        if (spec.frequency_count == 0) {
            throw ConfigError("manifold: frequency_count must be positive");
        }
        if (spec.max_frequency == 0) {
            throw ConfigError("manifold: max_frequency must be positive");
        }
    }
    if (!(spec.amplitude > 0.0)) {
        throw ConfigError("manifold: amplitude must be positive");
    }
}

namespace {

// One trig component of one ambient coordinate: integer frequency vector
// (never all zero), phase, and gaussian coefficient.
struct TrigComponent {
    std::vector<double> freq;
    double phase = 0.0;
    double coef = 0.0;
};

std::vector<TrigComponent> coordinate_components(const ManifoldSpec& spec,
                                                 std::size_t coord) {
    Rng rng(derive_seed(spec.embedding_seed, coord));
    const std::size_t m = spec.intrinsic_dim;
    const auto span = static_cast<std::uint64_t>(2 * spec.max_frequency + 1);
    std::vector<TrigComponent> comps(spec.frequency_count);
    for (auto& c : comps) {
        c.freq.resize(m);
        for (;;) {
            bool nonzero = false;
            for (std::size_t i = 0; i < m; ++i) {
                auto q = static_cast<long long>(rng.below(span)) -
                         static_cast<long long>(spec.max_frequency);
                c.freq[i] = static_cast<double>(q);
                if (q != 0) nonzero = true;
            }
            if (nonzero) break;
        }
        c.phase = 2.0 * std::numbers::pi * rng.uniform();
        c.coef = rng.normal();
    }
    return comps;
}

}  // namespace

std::vector<double> embed_latent(const ManifoldSpec& spec,
                                 std::span<const double> t) {
    validate(spec);
    if (t.size() != spec.intrinsic_dim) {
        throw ShapeError("embed_latent: latent has wrong dimension");
    }
    const std::size_t n = spec.ambient_dim;
    std::vector<double> u(n, 0.0);
    if (spec.embedding == EmbeddingKind::circle) {
        double a = 2.0 * std::numbers::pi * t[0];
        u[0] = spec.amplitude * std::cos(a);
        u[1] = spec.amplitude * std::sin(a);
        return u;
    }
    const double scale =
        spec.amplitude * std::sqrt(2.0 / static_cast<double>(spec.frequency_count));
    for (std::size_t a = 0; a < n; ++a) {
        auto comps = coordinate_components(spec, a);
        long double acc = 0.0L;
        for (const auto& c : comps) {
            double arg = c.phase + 2.0 * std::numbers::pi * dot_lr(c.freq, t);
            acc += static_cast<long double>(c.coef) * std::cos(arg);
        }
        u[a] = scale * static_cast<double>(acc);
    }
    return u;
}

ManifoldSample sample_manifold(const ManifoldSpec& spec, std::size_t count,
                               std::uint64_t seed) {
    validate(spec);
    if (count == 0) throw ConfigError("sample_manifold: count must be positive");
    const std::size_t m = spec.intrinsic_dim;
    const std::size_t n = spec.ambient_dim;

    ManifoldSample out;
    out.latents = Matrix(count, m);
    out.points = Matrix(count, n);
    for (std::size_t i = 0; i < count; ++i) {
        // Latents are uniform on [0,1)^m, one derived stream per point.
        Rng rng(derive_seed(seed, i));
        for (std::size_t j = 0; j < m; ++j) {
            out.latents.at(i, j) = 1.0 - rng.uniform();  // uniform() is (0,1]
        }
    }
    if (spec.embedding == EmbeddingKind::circle) {
        for (std::size_t i = 0; i < count; ++i) {
            auto u = embed_latent(spec, out.latents.row(i));
            std::copy(u.begin(), u.end(), out.points.row(i).begin());
        }
        return out;
    }
    // random_trig: hoist the per-coordinate components out of the point loop.
    const double scale =
        spec.amplitude * std::sqrt(2.0 / static_cast<double>(spec.frequency_count));
    for (std::size_t a = 0; a < n; ++a) {
        auto comps = coordinate_components(spec, a);
        for (std::size_t i = 0; i < count; ++i) {
            auto t = out.latents.row(i);
            long double acc = 0.0L;
            for (const auto& c : comps) {
                double arg = c.phase + 2.0 * std::numbers::pi * dot_lr(c.freq, t);
                acc += static_cast<long double>(c.coef) * std::cos(arg);
            }
            out.points.at(i, a) = scale * static_cast<double>(acc);
        }
    }
    return out;
}

TargetFn make_linear_target(std::vector<double> weights) {
    if (weights.empty()) throw ConfigError("linear target: empty weights");
    TargetFn fn;
    fn.tag = "linear";
    fn.lipschitz = std::sqrt(dot_lr(weights, weights));
    fn.f = [w = std::move(weights)](std::span<const double> u) {
        if (u.size() != w.size()) throw ShapeError("linear target: wrong input size");
        return dot_lr(w, u);
    };
    return fn;
}

TargetFn make_lipschitz_trig_target(std::size_t n, std::size_t components,
                                    std::uint64_t seed) {
    if (n == 0 || components == 0) {
        throw ConfigError("trig target: n and components must be positive");
    }
    Rng rng(derive_seed(seed, 0x74726967));
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(components));
    Matrix dirs(components, n);
    std::vector<double> phases(components), amps(components);
    for (std::size_t c = 0; c < components; ++c) {
        for (std::size_t i = 0; i < n; ++i) dirs.at(c, i) = rng.normal() * inv_sqrt_n;
        phases[c] = 2.0 * std::numbers::pi * rng.uniform();
        amps[c] = rng.normal();
    }
    // |grad f| <= (2*pi/sqrt(C)) * sum_c |amp_c| * |dir_c|
    double lip = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
        lip += std::fabs(amps[c]) * std::sqrt(dot_lr(dirs.row(c), dirs.row(c)));
    }
    lip *= 2.0 * std::numbers::pi * inv_sqrt_c;

    TargetFn fn;
    fn.tag = "lipschitz_trig";
    fn.lipschitz = lip;
    fn.f = [dirs = std::move(dirs), phases = std::move(phases),
            amps = std::move(amps), inv_sqrt_c](std::span<const double> u) {
        long double acc = 0.0L;
        for (std::size_t c = 0; c < dirs.rows; ++c) {
            double arg = phases[c] + 2.0 * std::numbers::pi * dot_lr(dirs.row(c), u);
            acc += static_cast<long double>(amps[c]) * std::cos(arg);
        }
        return static_cast<double>(acc) * inv_sqrt_c;
    };
    return fn;
}

TargetFn make_region_constant_target(Matrix anchors, std::vector<double> values) {
    if (anchors.rows == 0 || anchors.rows != values.size()) {
        throw ConfigError("region target: need one value per anchor");
    }
    TargetFn fn;
    fn.tag = "region_constant";
    fn.lipschitz = std::numeric_limits<double>::quiet_NaN();
    fn.f = [a = std::move(anchors),
            v = std::move(values)](std::span<const double> u) {
        if (u.size() != a.cols) throw ShapeError("region target: wrong input size");
        // Nearest anchor, lowest index on ties.
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < a.rows; ++r) {
            auto row = a.row(r);
            long double sq = 0.0L;
            for (std::size_t i = 0; i < row.size(); ++i) {
                double dlt = u[i] - row[i];
                sq += static_cast<long double>(dlt) * dlt;
            }
            auto dist = static_cast<double>(sq);
            if (dist < best_d) {
                best_d = dist;
                best = r;
            }
        }
        return v[best];
    };
    return fn;
}

TargetFn make_target(TargetTag tag, std::size_t n, std::uint64_t seed) {
    switch (tag) {
        case TargetTag::lipschitz_trig:
            return make_lipschitz_trig_target(n, 4, seed);
        case TargetTag::linear: {
            Rng rng(derive_seed(seed, 0x6c696e));
            std::vector<double> w(n);
            const double s = 1.0 / std::sqrt(static_cast<double>(n));
            for (double& x : w) x = rng.normal() * s;
            return make_linear_target(std::move(w));
        }
        case TargetTag::region_constant: {
            Rng rng(derive_seed(seed, 0x726567));
            const std::size_t anchors = 16;
            Matrix a(anchors, n);
            std::vector<double> v(anchors);
            for (std::size_t r = 0; r < anchors; ++r) {
                for (std::size_t i = 0; i < n; ++i) a.at(r, i) = rng.normal();
                v[r] = rng.normal();
            }
            return make_region_constant_target(std::move(a), std::move(v));
        }
    }
    throw ConfigError("make_target: unknown target tag");
}

Dataset scramble_labels(const Dataset& ds, std::uint64_t seed) {
    if (ds.kind != TaskKind::classification) {
        throw ConfigError("scramble_labels: dataset is not a classification task");
    }
    if (ds.num_classes == 0) {
        throw ConfigError("scramble_labels: num_classes is zero");
    }
    Dataset out = ds;
    Rng rng(derive_seed(seed, 0x73637261));
    for (auto& y : out.labels) {
        y = static_cast<int>(rng.below(ds.num_classes));
    }
    out.provenance = ds.provenance + "+scrambled";
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double_cell(const std::string& cell, std::size_t row1,
                         std::size_t col1, const std::string& name) {
    std::string t = trim(cell);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) {
        throw IngestionError("row " + std::to_string(row1) + ", column " +
                             std::to_string(col1) + " (" + name +
                             "): cannot parse '" + cell + "' as a number");
    }
    if (!std::isfinite(v)) {
        throw IngestionError("row " + std::to_string(row1) + ", column " +
                             std::to_string(col1) + " (" + name +
                             "): non-finite value");
    }
    return v;
}

int parse_label_cell(const std::string& cell, std::size_t row1, std::size_t col1,
                     const std::string& name) {
    std::string t = trim(cell);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || v < 0) {
        throw IngestionError("row " + std::to_string(row1) + ", column " +
                             std::to_string(col1) + " (" + name +
                             "): cannot parse '" + cell +
                             "' as a non-negative integer label");
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvColumnMap& map) {
    if (map.feature_columns.empty()) {
        throw ConfigError("load_csv: no feature columns requested");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    std::string line;
    std::size_t row1 = 0;  // 1-based physical row; the header is row 1
    // Header
    if (!std::getline(in, line)) {
        throw IngestionError("row 1: missing header row");
    }
    ++row1;
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    auto find_col = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw IngestionError("row 1: column '" + name + "' not found in header");
    };
    std::vector<std::size_t> feat_idx;
    feat_idx.reserve(map.feature_columns.size());
    for (const auto& name : map.feature_columns) feat_idx.push_back(find_col(name));
    const std::size_t target_idx = find_col(map.target_column);

    std::vector<double> flat;
    std::vector<double> targets;
    std::vector<int> labels;
    int max_label = -1;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++row1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate a trailing blank line
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw IngestionError("row " + std::to_string(row1) + ": has " +
                                 std::to_string(fields.size()) +
                                 " fields, header has " +
                                 std::to_string(header.size()));
        }
        for (std::size_t fi = 0; fi < feat_idx.size(); ++fi) {
            std::size_t c = feat_idx[fi];
            flat.push_back(parse_double_cell(fields[c], row1, c + 1, header[c]));
        }
        if (map.kind == TaskKind::regression) {
            targets.push_back(parse_double_cell(fields[target_idx], row1,
                                                target_idx + 1, header[target_idx]));
        } else {
            int y = parse_label_cell(fields[target_idx], row1, target_idx + 1,
                                     header[target_idx]);
            labels.push_back(y);
            if (y > max_label) max_label = y;
        }
        ++records;
    }
    if (records == 0) {
        throw IngestionError("row 1: header present but no data rows");
    }

    Dataset ds;
    ds.kind = map.kind;
    ds.inputs.rows = records;
    ds.inputs.cols = map.feature_columns.size();
    ds.inputs.data = std::move(flat);
    ds.targets = std::move(targets);
    ds.labels = std::move(labels);
    ds.num_classes =
        map.kind == TaskKind::classification ? static_cast<std::size_t>(max_label) + 1 : 0;
    ds.provenance = "csv:" + path;

    if (map.standardize) {
        const auto rows = static_cast<double>(ds.inputs.rows);
        for (std::size_t c = 0; c < ds.inputs.cols; ++c) {
            long double sum = 0.0L, sq = 0.0L;
            for (std::size_t r = 0; r < ds.inputs.rows; ++r) {
                double x = ds.inputs.at(r, c);
                sum += x;
                sq += static_cast<long double>(x) * x;
            }
            double mean = static_cast<double>(sum) / rows;
            double var = static_cast<double>(sq) / rows - mean * mean;
            double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;  // constant: center only
            for (std::size_t r = 0; r < ds.inputs.rows; ++r) {
                ds.inputs.at(r, c) = (ds.inputs.at(r, c) - mean) * scale;
            }
        }
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    if (ds.inputs.rows == 0) throw InputError("save_csv: empty dataset");
    CsvBuilder b;
    std::vector<std::string> cols;
    cols.reserve(ds.inputs.cols + 1);
    for (std::size_t c = 0; c < ds.inputs.cols; ++c) {
        cols.push_back("f" + std::to_string(c));
    }
    cols.push_back(ds.kind == TaskKind::regression ? "target" : "label");
    b.header(cols);
    std::vector<std::string> cells(cols.size());
    for (std::size_t r = 0; r < ds.inputs.rows; ++r) {
        for (std::size_t c = 0; c < ds.inputs.cols; ++c) {
            cells[c] = fmt_g17(ds.inputs.at(r, c));
        }
        cells.back() = ds.kind == TaskKind::regression
                           ? fmt_g17(ds.targets[r])
                           : std::to_string(ds.labels[r]);
        b.row(cells);
    }
    write_text_file(path, b.str());
}

}  // namespace eas
