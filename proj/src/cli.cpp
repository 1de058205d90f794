#include "eas/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eas/approximator.hpp"
#include "eas/csv.hpp"
#include "eas/data.hpp"
#include "eas/error.hpp"
#include "eas/experiments.hpp"
#include "eas/model_io.hpp"
#include "eas/rng.hpp"

namespace eas {

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// Feature columns default to "every header column except the target".
std::vector<std::string> feature_columns_from_header(const std::string& path,
                                                     const std::string& target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IngestionError("row 1: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> features;
    bool saw_target = false;
    for (const std::string& raw : split_commas(line)) {
        if (raw == target) {
            saw_target = true;
        } else {
            features.push_back(raw);
        }
    }
    if (!saw_target) {
        throw IngestionError("row 1: column '" + target + "' not found in header");
    }
    if (features.empty()) {
        throw IngestionError("row 1: no feature columns besides the target");
    }
    return features;
}

std::size_t default_k(std::size_t d) {
    auto k = static_cast<std::size_t>(
        std::ceil(8.0 * std::log(static_cast<double>(d))));
    if (k < 1) k = 1;
    if (k > d) k = d;
    return k;
}

RowDist parse_dist(const std::string& s) {
    if (s == "gaussian") return RowDist::gaussian;
    if (s == "unit_sphere") return RowDist::unit_sphere;
    throw ConfigError("dist must be 'gaussian' or 'unit_sphere', got '" + s + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"expand-and-sparsify approximator toolkit"};
    app.require_subcommand(1);

    // --- gen ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    std::string gen_out, gen_kind = "regression", gen_target = "lipschitz_trig";
    std::string gen_embedding = "random_trig";
    std::size_t gen_n = 20, gen_m = 1, gen_count = 1000, gen_classes = 4;
    std::size_t gen_freq = 3, gen_maxfreq = 3;
    double gen_amplitude = 1.0, gen_separation = 3.5;
    bool gen_normalize = false;
    std::uint64_t gen_seed = 1;
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--kind", gen_kind, "regression or classification");
    gen->add_option("--n", gen_n, "ambient dimension");
    gen->add_option("--m", gen_m, "intrinsic dimension (regression)");
    gen->add_option("--count", gen_count, "number of samples");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--target", gen_target,
                    "target family: lipschitz_trig, linear, region_constant");
    gen->add_option("--embedding", gen_embedding, "random_trig or circle");
    gen->add_option("--frequency-count", gen_freq, "trig components per coordinate");
    gen->add_option("--max-frequency", gen_maxfreq, "largest integer frequency");
    gen->add_option("--amplitude", gen_amplitude, "embedding amplitude");
    gen->add_option("--classes", gen_classes, "class count (classification)");
    gen->add_option("--separation", gen_separation,
                    "class center norm (classification)");
    gen->add_flag("--normalize-radius", gen_normalize,
                  "normalize class curves to radius sqrt(n) (classification)");

    // --- fit ------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a regression model from a CSV");
    std::string fit_data, fit_target_col = "target", fit_features, fit_out;
    std::string fit_dist = "unit_sphere", fit_encoding = "decimal";
    std::size_t fit_d = 0, fit_k = 0;
    std::optional<double> fit_sigma;
    std::uint64_t fit_seed = 1;
    bool fit_standardize = false;
    fit->add_option("--data", fit_data, "training CSV path")->required();
    fit->add_option("--target-column", fit_target_col, "target column name");
    fit->add_option("--features", fit_features,
                    "comma-separated feature columns (default: all but target)");
    fit->add_option("--out", fit_out, "model output path")->required();
    fit->add_option("--d", fit_d, "hidden units (required, > feature count)")
        ->required();
    fit->add_option("--k", fit_k, "target sparsity (default ceil(8*ln d))");
    fit->add_option("--dist", fit_dist, "row distribution");
    fit->add_option("--sigma", fit_sigma, "gaussian row sigma (default 1/sqrt(n))");
    fit->add_option("--seed", fit_seed, "projection seed");
    fit->add_option("--encoding", fit_encoding, "model payload: decimal or binary");
    fit->add_flag("--standardize", fit_standardize, "standardize features");

    // --- eval -----------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "evaluate a model on a CSV");
    std::string eval_model, eval_data, eval_target_col = "target", eval_features;
    bool eval_standardize = false;
    eval->add_option("--model", eval_model, "model path")->required();
    eval->add_option("--data", eval_data, "evaluation CSV path")->required();
    eval->add_option("--target-column", eval_target_col, "target column name");
    eval->add_option("--features", eval_features,
                     "comma-separated feature columns (default: all but target)");
    eval->add_flag("--standardize", eval_standardize, "standardize features");

    // --- experiment -----------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "run a named experiment");
    std::string exp_tag, exp_config, exp_out;
    std::vector<std::string> exp_sets;
    exp->add_option("tag", exp_tag,
                    "scaling, pruning, dropout, memorization or lsh_profile")
        ->required();
    exp->add_option("--config", exp_config, "JSON config document");
    exp->add_option("--set", exp_sets, "key=value config override")
        ->allow_extra_args(false);
    exp->add_option("--out", exp_out, "output CSV path (default <tag>.csv)");

    // --- inspect ----------------------------------------------------------
    auto* inspect = app.add_subcommand("inspect", "print a model summary");
    std::string inspect_model;
    inspect->add_option("--model", inspect_model, "model path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad flags are configuration errors
    }

    if (app.got_subcommand(gen)) {
        Dataset ds;
        if (gen_kind == "regression") {
            ManifoldSpec spec;
            spec.intrinsic_dim = gen_m;
            spec.ambient_dim = gen_n;
            spec.embedding_seed = derive_seed(gen_seed, 1);
            spec.frequency_count = gen_freq;
            spec.max_frequency = gen_maxfreq;
            spec.amplitude = gen_amplitude;
            if (gen_embedding == "circle") {
                spec.embedding = EmbeddingKind::circle;
            } else if (gen_embedding != "random_trig") {
                throw ConfigError("embedding must be 'random_trig' or 'circle'");
            }
            ManifoldSample sample =
                sample_manifold(spec, gen_count, derive_seed(gen_seed, 2));
            TargetTag tag;
            if (gen_target == "lipschitz_trig") {
                tag = TargetTag::lipschitz_trig;
            } else if (gen_target == "linear") {
                tag = TargetTag::linear;
            } else if (gen_target == "region_constant") {
                tag = TargetTag::region_constant;
            } else {
                throw ConfigError("unknown target family '" + gen_target + "'");
            }
            TargetFn f = make_target(tag, gen_n, derive_seed(gen_seed, 3));
            ds.kind = TaskKind::regression;
            ds.inputs = std::move(sample.points);
            ds.latents = std::move(sample.latents);
            ds.targets.resize(gen_count);
            for (std::size_t i = 0; i < gen_count; ++i) {
                ds.targets[i] = f(ds.inputs.row(i));
            }
            ds.seed = gen_seed;
            ds.provenance = "gen:regression";
        } else if (gen_kind == "classification") {
            if (gen_classes < 2) throw ConfigError("gen: need at least 2 classes");
            if (gen_count % gen_classes != 0) {
                throw ConfigError("gen: count must divide evenly by classes");
            }
            ds = make_clustered_classes(gen_classes, gen_n, gen_count / gen_classes,
                                        gen_separation, gen_freq, gen_maxfreq,
                                        gen_normalize, derive_seed(gen_seed, 1),
                                        derive_seed(gen_seed, 2));
        } else {
            throw ConfigError("kind must be 'regression' or 'classification'");
        }
        save_csv(ds, gen_out);
        std::printf("wrote %s (%zu rows, %zu features)\n", gen_out.c_str(),
                    ds.size(), ds.inputs.cols);
        return 0;
    }

    if (app.got_subcommand(fit)) {
        CsvColumnMap map;
        map.target_column = fit_target_col;
        map.kind = TaskKind::regression;
        map.standardize = fit_standardize;
        map.feature_columns =
            fit_features.empty()
                ? feature_columns_from_header(fit_data, fit_target_col)
                : split_commas(fit_features);
        Dataset ds = load_csv(fit_data, map);

        const std::size_t n = ds.inputs.cols;
        std::size_t k = fit_k == 0 ? default_k(fit_d) : fit_k;
        RowDist dist = parse_dist(fit_dist);
        if (fit_sigma && dist != RowDist::gaussian) {
            throw ConfigError("--sigma only applies to gaussian rows");
        }
        DistSpec spec = dist == RowDist::gaussian ? DistSpec::gaussian(fit_sigma)
                                                  : DistSpec::unit_sphere();
        ProjectionMatrix W = sample_projection(n, fit_d, spec, fit_seed);
        ThresholdVector tau = estimate_thresholds(W, ds.inputs, k, fit_seed);
        Approximator model =
            fit_readout(std::move(W), std::move(tau), ds.inputs, ds.targets);
        Encoding enc;
        if (fit_encoding == "decimal") {
            enc = Encoding::decimal;
        } else if (fit_encoding == "binary") {
            enc = Encoding::binary;
        } else {
            throw ConfigError("encoding must be 'decimal' or 'binary'");
        }
        save_model(model, fit_out, enc);
        EvalStats train = evaluate(model, ds.inputs, ds.targets, Fallback::global_mean);
        std::printf("wrote %s\n", fit_out.c_str());
        std::printf("model: %s\n", describe_model(model).c_str());
        std::printf("train_mean_abs_err %s\n", fmt_g17(train.mean_abs_err).c_str());
        return 0;
    }

    if (app.got_subcommand(eval)) {
        Approximator model = load_model(eval_model);
        CsvColumnMap map;
        map.target_column = eval_target_col;
        map.kind = TaskKind::regression;
        map.standardize = eval_standardize;
        map.feature_columns =
            eval_features.empty()
                ? feature_columns_from_header(eval_data, eval_target_col)
                : split_commas(eval_features);
        Dataset ds = load_csv(eval_data, map);
        EvalStats st = evaluate(model, ds.inputs, ds.targets, Fallback::global_mean);
        std::printf("mean_abs_err %s\n", fmt_g17(st.mean_abs_err).c_str());
        std::printf("max_abs_err %s\n", fmt_g17(st.max_abs_err).c_str());
        std::printf("rmse %s\n", fmt_g17(st.rmse).c_str());
        std::printf("no_active_count %zu\n", st.no_active_count);
        return 0;
    }

    if (app.got_subcommand(exp)) {
        std::vector<std::pair<std::string, std::string>> overrides;
        for (const std::string& s : exp_sets) {
            std::size_t eq = s.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ConfigError("--set expects key=value, got '" + s + "'");
            }
            overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
        std::string config_doc = exp_config.empty() ? "" : read_file(exp_config);
        ExperimentOutput out = run_experiment_json(exp_tag, config_doc, overrides);
        std::string path = exp_out.empty() ? exp_tag + ".csv" : exp_out;
        write_text_file(path, out.csv);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }

    Approximator model = load_model(inspect_model);
    std::printf("%s\n", describe_model(model).c_str());
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}

}  // namespace eas
