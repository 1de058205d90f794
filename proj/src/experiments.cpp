#include "eas/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <utility>

#include "eas/csv.hpp"
#include "eas/error.hpp"
#include "eas/rng.hpp"
#include "eas/sparsifier.hpp"

namespace eas {

SlopeFit ols_slope(std::span<const double> x, std::span<const double> y) {
    SlopeFit fit;
    fit.points = x.size();
    if (x.size() != y.size()) throw ShapeError("ols_slope: length mismatch");
    if (x.size() < 3 || !all_finite(x) || !all_finite(y)) {
        fit.degenerate = true;
        return fit;
    }
    const auto cnt = static_cast<long double>(x.size());
    long double mx = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= cnt;
    my /= cnt;
    long double sxx = 0.0L, sxy = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    if (!(sxx > 0.0L)) {
        fit.degenerate = true;
        return fit;
    }
    fit.slope = static_cast<double>(sxy / sxx);
    long double rss = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double r = (y[i] - my) - static_cast<long double>(fit.slope) * (x[i] - mx);
        rss += r * r;
    }
    fit.stderr_slope =
        static_cast<double>(std::sqrt(static_cast<double>(rss / (cnt - 2.0L) / sxx)));
    return fit;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double rank_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("rank_correlation: length mismatch");
    if (a.size() < 2) return 0.0;
    std::vector<double> ra = average_ranks(a);
    std::vector<double> rb = average_ranks(b);
    const auto cnt = static_cast<long double>(a.size());
    long double ma = 0.0L, mb = 0.0L;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= cnt;
    mb /= cnt;
    long double saa = 0.0L, sbb = 0.0L, sab = 0.0L;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        long double da = ra[i] - ma, db = rb[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (!(saa > 0.0L) || !(sbb > 0.0L)) return 0.0;  // a constant ladder
    return static_cast<double>(sab / std::sqrt(static_cast<double>(saa) *
                                               static_cast<double>(sbb)));
}

// ---------------------------------------------------------------------------
// Shared harness plumbing
// ---------------------------------------------------------------------------

namespace {

// Deterministic work loop: results land in caller-indexed slots, so thread
// count never changes the assembled output.
template <typename Fn>
void parallel_for(std::size_t total, std::size_t threads, const Fn& fn) {
    std::size_t t = threads == 0
                        ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                        : threads;
    t = std::min(t, total);
    if (t <= 1) {
        for (std::size_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

DistSpec dist_spec(RowDist dist) {
    return dist == RowDist::gaussian ? DistSpec::gaussian() : DistSpec::unit_sphere();
}

std::string dist_name(RowDist dist) {
    return dist == RowDist::gaussian ? "gaussian" : "unit_sphere";
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        if constexpr (std::is_same_v<T, double>) {
            out += fmt_g17(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

struct Split {
    Matrix fit_inputs, test_inputs;
    std::vector<double> fit_targets, test_targets;
};

// One scaling/dropout-style regression task: manifold sample split into fit
// and test halves with targets from a fresh Lipschitz trig instance.
Split make_regression_split(std::size_t m, std::size_t n, std::size_t fit_count,
                            std::size_t test_count, std::size_t frequency_count,
                            std::size_t max_frequency, double amplitude,
                            std::uint64_t seed) {
    ManifoldSpec spec;
    spec.intrinsic_dim = m;
    spec.ambient_dim = n;
    spec.embedding_seed = derive_seed(seed, 1);
    spec.frequency_count = frequency_count;
    spec.max_frequency = max_frequency;
    spec.amplitude = amplitude;
    ManifoldSample sample = sample_manifold(spec, fit_count + test_count,
                                            derive_seed(seed, 2));
    TargetFn f = make_target(TargetTag::lipschitz_trig, n, derive_seed(seed, 3));

    Split s;
    s.fit_inputs = Matrix(fit_count, n);
    s.test_inputs = Matrix(test_count, n);
    s.fit_targets.resize(fit_count);
    s.test_targets.resize(test_count);
    for (std::size_t i = 0; i < fit_count; ++i) {
        auto src = sample.points.row(i);
        std::copy(src.begin(), src.end(), s.fit_inputs.row(i).begin());
        s.fit_targets[i] = f(src);
    }
    for (std::size_t i = 0; i < test_count; ++i) {
        auto src = sample.points.row(fit_count + i);
        std::copy(src.begin(), src.end(), s.test_inputs.row(i).begin());
        s.test_targets[i] = f(src);
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

ScalingResult run_scaling(const ScalingConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("scaling: trials must be >= 1");
    if (cfg.intrinsic_dims.empty()) throw ConfigError("scaling: no intrinsic dims");
    if (cfg.ks.empty()) throw ConfigError("scaling: no k values");
    if (cfg.fit_samples == 0 || cfg.test_samples == 0) {
        throw ConfigError("scaling: sample counts must be positive");
    }
    {
        std::set<std::size_t> uniq(cfg.ds.begin(), cfg.ds.end());
        if (uniq.size() < 3) {
            throw ConfigError("scaling: need at least 3 distinct d values, got " +
                              std::to_string(uniq.size()));
        }
    }
    for (std::size_t m : cfg.intrinsic_dims) {
        if (m == 0 || m >= cfg.n) throw ConfigError("scaling: need 0 < m < n");
    }
    for (std::size_t d : cfg.ds) {
        if (d <= cfg.n) throw ConfigError("scaling: every d must exceed n");
        for (std::size_t k : cfg.ks) {
            if (k == 0 || k > d) throw ConfigError("scaling: need 0 < k <= d");
        }
    }

    struct Combo {
        std::size_t m, k, d;
    };
    std::vector<Combo> combos;
    for (std::size_t m : cfg.intrinsic_dims) {
        for (std::size_t k : cfg.ks) {
            for (std::size_t d : cfg.ds) combos.push_back({m, k, d});
        }
    }

    ScalingResult res;
    res.cells.resize(combos.size() * cfg.trials);
    parallel_for(res.cells.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t combo = idx / cfg.trials;
        const std::size_t trial = idx % cfg.trials;
        const Combo& c = combos[combo];
        const std::uint64_t cs = derive_seed(cfg.seed, combo, trial);

        Split s = make_regression_split(c.m, cfg.n, cfg.fit_samples,
                                        cfg.test_samples, cfg.frequency_count,
                                        cfg.max_frequency, cfg.amplitude, cs);
        ProjectionMatrix W =
            sample_projection(cfg.n, c.d, dist_spec(cfg.dist), derive_seed(cs, 4));
        ThresholdVector tau =
            estimate_thresholds(W, s.fit_inputs, c.k, derive_seed(cs, 2));
        Approximator model =
            fit_readout(std::move(W), std::move(tau), s.fit_inputs, s.fit_targets);

        ScalingCell& cell = res.cells[idx];
        cell.m = c.m;
        cell.k = c.k;
        cell.d = c.d;
        cell.trial = trial;
        cell.stats = evaluate(model, s.test_inputs, s.test_targets,
                              Fallback::global_mean);
    });

    // One OLS slope per (m, k) over per-trial log-log points.
    for (std::size_t m : cfg.intrinsic_dims) {
        for (std::size_t k : cfg.ks) {
            std::vector<double> xs, ys;
            for (const ScalingCell& cell : res.cells) {
                if (cell.m != m || cell.k != k) continue;
                xs.push_back(std::log(static_cast<double>(cell.k) /
                                      static_cast<double>(cell.d)));
                ys.push_back(std::log(cell.stats.mean_abs_err));
            }
            ScalingSlopeRow row;
            row.m = m;
            row.k = k;
            row.fit = ols_slope(xs, ys);
            res.slopes.push_back(row);
        }
    }

    CsvBuilder b;
    b.comment("experiment", "scaling");
    b.comment("seed", std::to_string(cfg.seed));
    b.comment("trials", std::to_string(cfg.trials));
    b.comment("n", std::to_string(cfg.n));
    b.comment("intrinsic_dims", join(cfg.intrinsic_dims));
    b.comment("ks", join(cfg.ks));
    b.comment("ds", join(cfg.ds));
    b.comment("dist", dist_name(cfg.dist));
    b.comment("fit_samples", std::to_string(cfg.fit_samples));
    b.comment("test_samples", std::to_string(cfg.test_samples));
    b.comment("frequency_count", std::to_string(cfg.frequency_count));
    b.comment("max_frequency", std::to_string(cfg.max_frequency));
    b.comment("amplitude", fmt_g17(cfg.amplitude));
    b.header({"row_kind", "n", "d", "k", "m", "trial", "mean_abs_err",
              "max_abs_err", "no_active_count", "slope", "slope_stderr",
              "points"});
    for (const ScalingCell& cell : res.cells) {
        b.row({"cell", std::to_string(cfg.n), std::to_string(cell.d),
               std::to_string(cell.k), std::to_string(cell.m),
               std::to_string(cell.trial), fmt_g17(cell.stats.mean_abs_err),
               fmt_g17(cell.stats.max_abs_err),
               std::to_string(cell.stats.no_active_count), "", "", ""});
    }
    for (const ScalingSlopeRow& row : res.slopes) {
        b.row({row.fit.degenerate ? "slope_degenerate" : "slope",
               std::to_string(cfg.n), "", std::to_string(row.k),
               std::to_string(row.m), "", "", "", "", fmt_g17(row.fit.slope),
               fmt_g17(row.fit.stderr_slope), std::to_string(row.fit.points)});
    }
    res.csv = b.str();
    return res;
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

PruningResult run_pruning(const PruningConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("pruning: trials must be >= 1");
    if (cfg.m == 0 || cfg.m >= cfg.n) throw ConfigError("pruning: need 0 < m < n");
    if (cfg.d <= cfg.n) throw ConfigError("pruning: need d > n");
    if (cfg.k == 0 || cfg.k > cfg.d) throw ConfigError("pruning: need 0 < k <= d");
    if (cfg.train_samples == 0 || cfg.calib_samples == 0 || cfg.probe_samples == 0) {
        throw ConfigError("pruning: sample counts must be positive");
    }
    if (!(cfg.probe_scale > 0.0)) {
        throw ConfigError("pruning: probe_scale must be positive");
    }

    PruningResult res;
    res.cells.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        const std::uint64_t ts = derive_seed(cfg.seed, 0, trial);

        ManifoldSpec spec;
        spec.intrinsic_dim = cfg.m;
        spec.ambient_dim = cfg.n;
        spec.embedding_seed = derive_seed(ts, 1);
        spec.frequency_count = cfg.frequency_count;
        spec.max_frequency = cfg.max_frequency;
        spec.amplitude = cfg.amplitude;
        TargetFn f = make_target(TargetTag::lipschitz_trig, cfg.n, derive_seed(ts, 3));

        ManifoldSample train =
            sample_manifold(spec, cfg.train_samples, derive_seed(ts, 2));
        // Thresholds are calibrated on a larger off-training sample, so the
        // small training set genuinely leaves most units untouched at tiny k.
        ManifoldSample calib =
            sample_manifold(spec, cfg.calib_samples, derive_seed(ts, 5));
        ManifoldSample probe =
            sample_manifold(spec, cfg.probe_samples, derive_seed(ts, 6));
        for (double& x : probe.points.data) x *= cfg.probe_scale;

        std::vector<double> train_y(cfg.train_samples), probe_y(cfg.probe_samples);
        for (std::size_t i = 0; i < cfg.train_samples; ++i) {
            train_y[i] = f(train.points.row(i));
        }
        for (std::size_t i = 0; i < cfg.probe_samples; ++i) {
            probe_y[i] = f(probe.points.row(i));
        }

        ProjectionMatrix W =
            sample_projection(cfg.n, cfg.d, dist_spec(cfg.dist), derive_seed(ts, 4));
        ThresholdVector tau =
            estimate_thresholds(W, calib.points, cfg.k, derive_seed(ts, 5));
        Approximator model =
            fit_readout(std::move(W), std::move(tau), train.points, train_y);

        PruningCell& cell = res.cells[trial];
        cell.trial = trial;
        cell.train_err_before =
            evaluate(model, train.points, train_y, Fallback::global_mean).mean_abs_err;
        cell.probe_err_before =
            evaluate(model, probe.points, probe_y, Fallback::global_mean).mean_abs_err;

        PruneResult pruned = prune_dead(model, train.points);
        cell.removed_count = pruned.removed_count;
        cell.train_err_after =
            evaluate(pruned.model, train.points, train_y, Fallback::global_mean)
                .mean_abs_err;
        cell.probe_err_after =
            evaluate(pruned.model, probe.points, probe_y, Fallback::global_mean)
                .mean_abs_err;
    });

    CsvBuilder b;
    b.comment("experiment", "pruning");
    b.comment("seed", std::to_string(cfg.seed));
    b.comment("trials", std::to_string(cfg.trials));
    b.comment("n", std::to_string(cfg.n));
    b.comment("m", std::to_string(cfg.m));
    b.comment("d", std::to_string(cfg.d));
    b.comment("k", std::to_string(cfg.k));
    b.comment("train_samples", std::to_string(cfg.train_samples));
    b.comment("calib_samples", std::to_string(cfg.calib_samples));
    b.comment("probe_samples", std::to_string(cfg.probe_samples));
    b.comment("probe_scale", fmt_g17(cfg.probe_scale));
    b.comment("dist", dist_name(cfg.dist));
    b.comment("frequency_count", std::to_string(cfg.frequency_count));
    b.comment("max_frequency", std::to_string(cfg.max_frequency));
    b.comment("amplitude", fmt_g17(cfg.amplitude));
    b.header({"row_kind", "d", "k", "trial", "removed_count", "train_err_before",
              "train_err_after", "probe_err_before", "probe_err_after"});
    for (const PruningCell& cell : res.cells) {
        b.row({"cell", std::to_string(cfg.d), std::to_string(cfg.k),
               std::to_string(cell.trial), std::to_string(cell.removed_count),
               fmt_g17(cell.train_err_before), fmt_g17(cell.train_err_after),
               fmt_g17(cell.probe_err_before), fmt_g17(cell.probe_err_after)});
    }
    res.csv = b.str();
    return res;
}

// ---------------------------------------------------------------------------
// Dropout
// ---------------------------------------------------------------------------

namespace {

// Mean absolute held-out error with dropout applied to every code (fit and
// eval); rate 0 reduces to the plain pipeline bit-for-bit.
double dropout_arm_error(const ProjectionMatrix& W, const ThresholdVector& tau,
                         const Split& s, double rate, std::uint64_t arm_seed) {
    std::vector<SparseCode> codes;
    codes.reserve(s.fit_inputs.rows);
    for (std::size_t i = 0; i < s.fit_inputs.rows; ++i) {
        SparseCode code = sparsify_binary(project(W, s.fit_inputs.row(i)), tau);
        codes.push_back(apply_dropout(code, rate, derive_seed(arm_seed, 1, i)));
    }
    Approximator model = fit_readout_from_codes(W, tau, codes, s.fit_targets);

    long double abs_sum = 0.0L;
    for (std::size_t i = 0; i < s.test_inputs.rows; ++i) {
        SparseCode code = sparsify_binary(project(W, s.test_inputs.row(i)), tau);
        code = apply_dropout(code, rate, derive_seed(arm_seed, 2, i));
        double yhat;
        try {
            yhat = predict_from_code(model, code);
        } catch (const NoActiveUnits&) {
            yhat = model.global_mean;
        }
        abs_sum += std::fabs(yhat - s.test_targets[i]);
    }
    return static_cast<double>(abs_sum /
                               static_cast<long double>(s.test_inputs.rows));
}

}  // namespace

DropoutResult run_dropout(const DropoutConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("dropout: trials must be >= 1");
    if (cfg.m == 0 || cfg.m >= cfg.n) throw ConfigError("dropout: need 0 < m < n");
    if (cfg.d <= cfg.n) throw ConfigError("dropout: need d > n");
    if (cfg.k == 0 || cfg.k > cfg.d) throw ConfigError("dropout: need 0 < k <= d");
    if (cfg.fit_samples == 0 || cfg.test_samples == 0) {
        throw ConfigError("dropout: sample counts must be positive");
    }
    if (cfg.rates.empty()) throw ConfigError("dropout: no rates");
    for (std::size_t i = 0; i < cfg.rates.size(); ++i) {
        if (!(cfg.rates[i] >= 0.0 && cfg.rates[i] < 1.0)) {
            throw ConfigError("dropout: rates must lie in [0,1)");
        }
        if (i > 0 && !(cfg.rates[i] > cfg.rates[i - 1])) {
            throw ConfigError("dropout: rates must be strictly increasing");
        }
        if (std::llround(static_cast<double>(cfg.k) * (1.0 - cfg.rates[i])) < 1) {
            throw ConfigError("dropout: matched sparsity k*(1-p) rounds below 1");
        }
    }

    DropoutResult res;
    res.cells.resize(cfg.trials * cfg.rates.size());
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        const std::uint64_t ts = derive_seed(cfg.seed, 0, trial);
        Split s = make_regression_split(cfg.m, cfg.n, cfg.fit_samples,
                                        cfg.test_samples, cfg.frequency_count,
                                        cfg.max_frequency, cfg.amplitude, ts);
        ProjectionMatrix W =
            sample_projection(cfg.n, cfg.d, dist_spec(cfg.dist), derive_seed(ts, 4));
        ThresholdVector tau_k =
            estimate_thresholds(W, s.fit_inputs, cfg.k, derive_seed(ts, 2));

        for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
            const double p = cfg.rates[ri];
            const auto k_eff = static_cast<std::size_t>(
                std::llround(static_cast<double>(cfg.k) * (1.0 - p)));

            DropoutCell& cell = res.cells[trial * cfg.rates.size() + ri];
            cell.trial = trial;
            cell.rate = p;
            cell.k_effective = k_eff;
            cell.err_dropout =
                dropout_arm_error(W, tau_k, s, p, derive_seed(ts, 7, ri));

            ThresholdVector tau_m =
                estimate_thresholds(W, s.fit_inputs, k_eff, derive_seed(ts, 2));
            Approximator matched = fit_readout(W, tau_m, s.fit_inputs, s.fit_targets);
            cell.err_matched =
                evaluate(matched, s.test_inputs, s.test_targets,
                         Fallback::global_mean)
                    .mean_abs_err;
        }
    });

    // Rank correlation between the per-rate mean error ladders.
    std::vector<double> ladder_dropout(cfg.rates.size(), 0.0);
    std::vector<double> ladder_matched(cfg.rates.size(), 0.0);
    for (const DropoutCell& cell : res.cells) {
        const auto ri = static_cast<std::size_t>(
            std::find(cfg.rates.begin(), cfg.rates.end(), cell.rate) -
            cfg.rates.begin());
        ladder_dropout[ri] += cell.err_dropout;
        ladder_matched[ri] += cell.err_matched;
    }
    for (double& v : ladder_dropout) v /= static_cast<double>(cfg.trials);
    for (double& v : ladder_matched) v /= static_cast<double>(cfg.trials);
    res.rank_correlation = rank_correlation(ladder_dropout, ladder_matched);

    CsvBuilder b;
    b.comment("experiment", "dropout");
    b.comment("seed", std::to_string(cfg.seed));
    b.comment("trials", std::to_string(cfg.trials));
    b.comment("n", std::to_string(cfg.n));
    b.comment("m", std::to_string(cfg.m));
    b.comment("d", std::to_string(cfg.d));
    b.comment("k", std::to_string(cfg.k));
    b.comment("rates", join(cfg.rates));
    b.comment("fit_samples", std::to_string(cfg.fit_samples));
    b.comment("test_samples", std::to_string(cfg.test_samples));
    b.comment("dist", dist_name(cfg.dist));
    b.comment("frequency_count", std::to_string(cfg.frequency_count));
    b.comment("max_frequency", std::to_string(cfg.max_frequency));
    b.comment("amplitude", fmt_g17(cfg.amplitude));
    b.header({"row_kind", "trial", "dropout_rate", "k_effective", "err_dropout",
              "err_matched", "err_difference", "rank_correlation"});
    for (const DropoutCell& cell : res.cells) {
        b.row({"cell", std::to_string(cell.trial), fmt_g17(cell.rate),
               std::to_string(cell.k_effective), fmt_g17(cell.err_dropout),
               fmt_g17(cell.err_matched),
               fmt_g17(cell.err_dropout - cell.err_matched), ""});
    }
    b.row({"summary", "", "", "", "", "", "", fmt_g17(res.rank_correlation)});
    res.csv = b.str();
    return res;
}

// ---------------------------------------------------------------------------
// Memorization
// ---------------------------------------------------------------------------

Dataset make_clustered_classes(std::size_t classes, std::size_t n,
                               std::size_t per_class, double separation,
                               std::size_t frequency_count,
                               std::size_t max_frequency, bool normalize_radius,
                               std::uint64_t embedding_seed,
                               std::uint64_t sample_seed) {
    if (classes < 2) throw ConfigError("clustered classes: need >= 2 classes");
    if (per_class == 0) throw ConfigError("clustered classes: per_class must be positive");
    if (!(separation >= 0.0)) {
        throw ConfigError("clustered classes: separation must be non-negative");
    }
    const double radius = std::sqrt(static_cast<double>(n));

    Dataset ds;
    ds.kind = TaskKind::classification;
    ds.num_classes = classes;
    ds.inputs = Matrix(classes * per_class, n);
    ds.latents = Matrix(classes * per_class, 1);
    ds.labels.resize(classes * per_class);
    ds.seed = sample_seed;
    ds.provenance = "clustered_classes";

    for (std::size_t c = 0; c < classes; ++c) {
        ManifoldSpec spec;
        spec.intrinsic_dim = 1;
        spec.ambient_dim = n;
        spec.embedding_seed = derive_seed(embedding_seed, 1, c);
        spec.frequency_count = frequency_count;
        spec.max_frequency = max_frequency;
        ManifoldSample sample =
            sample_manifold(spec, per_class, derive_seed(sample_seed, c));

        Rng center_rng(derive_seed(embedding_seed, 2, c));
        std::vector<double> center = unit_direction(center_rng, n);
        for (double& x : center) x *= separation;

        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t row = c * per_class + i;
            auto src = sample.points.row(i);
            auto dst = ds.inputs.row(row);
            double scale = 1.0;
            if (normalize_radius) {
                // Constant-radius wiggle keeps the top-of-distribution
                // competition direction-driven instead of norm-driven.
                double norm = std::sqrt(dot_lr(src, src));
                scale = norm > 0.0 ? radius / norm : 0.0;
            }
            for (std::size_t t = 0; t < n; ++t) dst[t] = src[t] * scale + center[t];
            ds.latents.at(row, 0) = sample.latents.at(i, 0);
            ds.labels[row] = static_cast<int>(c);
        }
    }
    return ds;
}

MemorizationResult run_memorization(const MemorizationConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("memorization: trials must be >= 1");
    if (cfg.classes < 2) throw ConfigError("memorization: need >= 2 classes");
    if (cfg.d <= cfg.n) throw ConfigError("memorization: need d > n");
    if (cfg.k == 0 || cfg.k > cfg.d) throw ConfigError("memorization: need 0 < k <= d");
    if (cfg.train_samples == 0 || cfg.test_samples == 0) {
        throw ConfigError("memorization: sample counts must be positive");
    }
    if (cfg.train_samples % cfg.classes != 0 || cfg.test_samples % cfg.classes != 0) {
        throw ConfigError("memorization: sample counts must divide evenly by classes");
    }

    MemorizationResult res;
    res.cells.resize(cfg.trials * 2);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        const std::uint64_t ts = derive_seed(cfg.seed, 0, trial);
        Dataset train = make_clustered_classes(
            cfg.classes, cfg.n, cfg.train_samples / cfg.classes, cfg.separation,
            cfg.frequency_count, cfg.max_frequency, cfg.normalize_radius,
            derive_seed(ts, 1), derive_seed(ts, 2));
        Dataset test = make_clustered_classes(
            cfg.classes, cfg.n, cfg.test_samples / cfg.classes, cfg.separation,
            cfg.frequency_count, cfg.max_frequency, cfg.normalize_radius,
            derive_seed(ts, 1), derive_seed(ts, 3));  // same curves, new latents

        ProjectionMatrix W =
            sample_projection(cfg.n, cfg.d, dist_spec(cfg.dist), derive_seed(ts, 4));
        ThresholdVector tau =
            estimate_thresholds(W, train.inputs, cfg.k, derive_seed(ts, 2));

        Dataset scrambled = scramble_labels(train, derive_seed(ts, 9));

        for (int arm = 0; arm < 2; ++arm) {
            const std::vector<int>& fit_labels =
                arm == 0 ? train.labels : scrambled.labels;
            Classifier model =
                fit_classifier(W, tau, train.inputs, fit_labels, cfg.classes);
            MemorizationCell& cell = res.cells[trial * 2 + arm];
            cell.trial = trial;
            cell.scrambled = arm == 1;
            // Train accuracy is against the labels the arm was fit on; test
            // accuracy is always against the true labels.
            cell.train_acc =
                classification_accuracy(model, train.inputs, fit_labels);
            cell.test_acc = classification_accuracy(model, test.inputs, test.labels);
            cell.dead_units = 0;
            for (std::uint8_t b : model.dead_mask) cell.dead_units += b;
        }
    });

    // Per-arm means and the scrambled-test standard error over trials.
    long double sums[4] = {0.0L, 0.0L, 0.0L, 0.0L};
    std::vector<double> scr_test;
    for (const MemorizationCell& cell : res.cells) {
        if (!cell.scrambled) {
            sums[0] += cell.train_acc;
            sums[1] += cell.test_acc;
        } else {
            sums[2] += cell.train_acc;
            sums[3] += cell.test_acc;
            scr_test.push_back(cell.test_acc);
        }
    }
    const auto tr = static_cast<long double>(cfg.trials);
    res.true_train_acc = static_cast<double>(sums[0] / tr);
    res.true_test_acc = static_cast<double>(sums[1] / tr);
    res.scrambled_train_acc = static_cast<double>(sums[2] / tr);
    res.scrambled_test_acc = static_cast<double>(sums[3] / tr);
    if (scr_test.size() > 1) {
        long double var = 0.0L;
        for (double v : scr_test) {
            long double dv = v - res.scrambled_test_acc;
            var += dv * dv;
        }
        var /= static_cast<long double>(scr_test.size() - 1);
        res.scrambled_test_se = std::sqrt(static_cast<double>(var) /
                                          static_cast<double>(scr_test.size()));
    }

    CsvBuilder b;
    b.comment("experiment", "memorization");
    b.comment("seed", std::to_string(cfg.seed));
    b.comment("trials", std::to_string(cfg.trials));
    b.comment("n", std::to_string(cfg.n));
    b.comment("classes", std::to_string(cfg.classes));
    b.comment("d", std::to_string(cfg.d));
    b.comment("k", std::to_string(cfg.k));
    b.comment("train_samples", std::to_string(cfg.train_samples));
    b.comment("test_samples", std::to_string(cfg.test_samples));
    b.comment("separation", fmt_g17(cfg.separation));
    b.comment("frequency_count", std::to_string(cfg.frequency_count));
    b.comment("max_frequency", std::to_string(cfg.max_frequency));
    b.comment("normalize_radius", cfg.normalize_radius ? "1" : "0");
    b.comment("dist", dist_name(cfg.dist));
    b.header({"row_kind", "labels", "d", "k", "trial", "train_acc", "test_acc",
              "dead_units", "test_acc_se"});
    for (const MemorizationCell& cell : res.cells) {
        b.row({"cell", cell.scrambled ? "scrambled" : "true",
               std::to_string(cfg.d), std::to_string(cfg.k),
               std::to_string(cell.trial), fmt_g17(cell.train_acc),
               fmt_g17(cell.test_acc), std::to_string(cell.dead_units), ""});
    }
    b.row({"summary", "true", std::to_string(cfg.d), std::to_string(cfg.k), "",
           fmt_g17(res.true_train_acc), fmt_g17(res.true_test_acc), "", ""});
    b.row({"summary", "scrambled", std::to_string(cfg.d), std::to_string(cfg.k),
           "", fmt_g17(res.scrambled_train_acc), fmt_g17(res.scrambled_test_acc),
           "", fmt_g17(res.scrambled_test_se)});
    res.csv = b.str();
    return res;
}

// ---------------------------------------------------------------------------
// LSH profile
// ---------------------------------------------------------------------------

LshProfileResult run_lsh_profile(const LshProfileConfig& cfg) {
    if (cfg.d <= cfg.n) throw ConfigError("lsh_profile: need d > n");
    if (cfg.k == 0 || cfg.k > cfg.d) throw ConfigError("lsh_profile: need 0 < k <= d");
    if (cfg.calib_samples == 0) {
        throw ConfigError("lsh_profile: calib_samples must be positive");
    }
    if (cfg.base_count == 0) {
        throw ConfigError("lsh_profile: base_count must be positive");
    }
    if (cfg.radii.empty()) throw ConfigError("lsh_profile: no radii");
    if (cfg.pairs_per_radius == 0) {
        throw ConfigError("lsh_profile: pairs_per_radius must be positive");
    }

    // Unit-scale inputs: uniform directions on the sphere in R^n.
    auto sphere_matrix = [&](std::size_t count, std::uint64_t seed) {
        Matrix m(count, cfg.n);
        for (std::size_t i = 0; i < count; ++i) {
            Rng rng(derive_seed(seed, i));
            std::vector<double> v = unit_direction(rng, cfg.n);
            std::copy(v.begin(), v.end(), m.row(i).begin());
        }
        return m;
    };

    Matrix calib = sphere_matrix(cfg.calib_samples, derive_seed(cfg.seed, 1));
    Matrix bases = sphere_matrix(cfg.base_count, derive_seed(cfg.seed, 2));
    ProjectionMatrix W =
        sample_projection(cfg.n, cfg.d, dist_spec(cfg.dist), derive_seed(cfg.seed, 3));
    ThresholdVector tau =
        estimate_thresholds(W, calib, cfg.k, derive_seed(cfg.seed, 1));

    LshProfileResult res;
    res.profile = similarity_profile(W, tau, bases, cfg.radii,
                                     cfg.pairs_per_radius, derive_seed(cfg.seed, 4));

    // Overlap between codes of independent fresh draws.
    {
        Matrix xs = sphere_matrix(cfg.pairs_per_radius, derive_seed(cfg.seed, 5));
        Matrix ys = sphere_matrix(cfg.pairs_per_radius, derive_seed(cfg.seed, 6));
        unsigned long long sum = 0, sumsq = 0;
        for (std::size_t i = 0; i < cfg.pairs_per_radius; ++i) {
            SparseCode a = sparsify_binary(project(W, xs.row(i)), tau);
            SparseCode bcode = sparsify_binary(project(W, ys.row(i)), tau);
            unsigned long long ov = code_overlap(a, bcode);
            sum += ov;
            sumsq += ov * ov;
        }
        const auto cnt = static_cast<double>(cfg.pairs_per_radius);
        res.baseline_pairs = cfg.pairs_per_radius;
        res.baseline_mean = static_cast<double>(sum) / cnt;
        double var = static_cast<double>(sumsq) / cnt -
                     res.baseline_mean * res.baseline_mean;
        res.baseline_std = var > 0.0 ? std::sqrt(var) : 0.0;
    }

    CsvBuilder b;
    b.comment("experiment", "lsh_profile");
    b.comment("seed", std::to_string(cfg.seed));
    b.comment("n", std::to_string(cfg.n));
    b.comment("d", std::to_string(cfg.d));
    b.comment("k", std::to_string(cfg.k));
    b.comment("calib_samples", std::to_string(cfg.calib_samples));
    b.comment("base_count", std::to_string(cfg.base_count));
    b.comment("radii", join(cfg.radii));
    b.comment("pairs_per_radius", std::to_string(cfg.pairs_per_radius));
    b.comment("dist", dist_name(cfg.dist));
    b.header({"row_kind", "bin_lo", "bin_hi", "mean", "std", "count"});
    for (const OverlapBin& bin : res.profile.bins) {
        b.row({"bin", fmt_g17(bin.distance_lo), fmt_g17(bin.distance_hi),
               fmt_g17(bin.mean_overlap), fmt_g17(bin.std_overlap),
               std::to_string(bin.pair_count)});
    }
    b.row({"baseline", "", "", fmt_g17(res.baseline_mean),
           fmt_g17(res.baseline_std), std::to_string(res.baseline_pairs)});
    res.csv = b.str();
    return res;
}

}  // namespace eas
