#include <optional>
#include <utility>

#include "eas/error.hpp"
#include "eas/experiments.hpp"
#include "json.hpp"

namespace eas {

namespace {

using nlohmann::json;

json parse_config(const std::string& text) {
    if (text.empty()) return json::object();
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError("config: malformed JSON document");
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
    return j;
}

// Pops recognized keys off the document; anything left over at the end is an
// unknown key and rejected, so typos fail loudly instead of running defaults.
class ConfigReader {
public:
    explicit ConfigReader(json doc) : j_(std::move(doc)) {}

    void get_size(const char* key, std::size_t& out) {
        if (auto v = take(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ConfigError(bad(key, "a non-negative integer"));
            }
            out = v->get<std::size_t>();
        }
    }

    void get_seed(const char* key, std::uint64_t& out) {
        if (auto v = take(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ConfigError(bad(key, "a non-negative integer"));
            }
            out = v->get<std::uint64_t>();
        }
    }

    void get_double(const char* key, double& out) {
        if (auto v = take(key)) {
            if (!v->is_number()) throw ConfigError(bad(key, "a number"));
            out = v->get<double>();
        }
    }

    void get_bool(const char* key, bool& out) {
        if (auto v = take(key)) {
            if (v->is_boolean()) {
                out = v->get<bool>();
            } else if (v->is_number_integer()) {
                out = v->get<long long>() != 0;
            } else {
                throw ConfigError(bad(key, "a boolean"));
            }
        }
    }

    void get_sizes(const char* key, std::vector<std::size_t>& out) {
        if (auto v = take(key)) {
            if (!v->is_array() || v->empty()) {
                throw ConfigError(bad(key, "a non-empty array of integers"));
            }
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_integer() || e.get<long long>() < 0) {
                    throw ConfigError(bad(key, "a non-empty array of integers"));
                }
                out.push_back(e.get<std::size_t>());
            }
        }
    }

    void get_doubles(const char* key, std::vector<double>& out) {
        if (auto v = take(key)) {
            if (!v->is_array() || v->empty()) {
                throw ConfigError(bad(key, "a non-empty array of numbers"));
            }
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) {
                    throw ConfigError(bad(key, "a non-empty array of numbers"));
                }
                out.push_back(e.get<double>());
            }
        }
    }

    void get_dist(const char* key, RowDist& out) {
        if (auto v = take(key)) {
            if (!v->is_string()) {
                throw ConfigError(bad(key, "\"gaussian\" or \"unit_sphere\""));
            }
            auto s = v->get<std::string>();
            if (s == "gaussian") {
                out = RowDist::gaussian;
            } else if (s == "unit_sphere") {
                out = RowDist::unit_sphere;
            } else {
                throw ConfigError(bad(key, "\"gaussian\" or \"unit_sphere\""));
            }
        }
    }

    void finish(const std::string& tag) const {
        if (!j_.empty()) {
            throw ConfigError("config: unknown key '" + j_.begin().key() +
                              "' for experiment '" + tag + "'");
        }
    }

private:
    std::optional<json> take(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        json v = *it;
        j_.erase(it);
        return v;
    }

    static std::string bad(const char* key, const char* want) {
        return std::string("config: key '") + key + "' must be " + want;
    }

    json j_;
};

}  // namespace

ExperimentOutput run_experiment_json(
    const std::string& tag, const std::string& config_json,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    json doc = parse_config(config_json);
    for (const auto& [key, value] : overrides) {
        json v = json::parse(value, nullptr, /*allow_exceptions=*/false);
        if (v.is_discarded()) v = value;  // bare words (e.g. dist=gaussian)
        doc[key] = v;
    }

    ConfigReader r(std::move(doc));
    ExperimentOutput out;
    out.tag = tag;
    if (tag == "scaling") {
        ScalingConfig cfg;
        r.get_seed("seed", cfg.seed);
        r.get_size("trials", cfg.trials);
        r.get_size("n", cfg.n);
        r.get_sizes("intrinsic_dims", cfg.intrinsic_dims);
        r.get_sizes("ks", cfg.ks);
        r.get_sizes("ds", cfg.ds);
        r.get_dist("dist", cfg.dist);
        r.get_size("fit_samples", cfg.fit_samples);
        r.get_size("test_samples", cfg.test_samples);
        r.get_size("frequency_count", cfg.frequency_count);
        r.get_size("max_frequency", cfg.max_frequency);
        r.get_double("amplitude", cfg.amplitude);
        r.get_size("threads", cfg.threads);
        r.finish(tag);
        out.csv = run_scaling(cfg).csv;
    } else if (tag == "pruning") {
        PruningConfig cfg;
        r.get_seed("seed", cfg.seed);
        r.get_size("trials", cfg.trials);
        r.get_size("n", cfg.n);
        r.get_size("m", cfg.m);
        r.get_size("d", cfg.d);
        r.get_size("k", cfg.k);
        r.get_size("train_samples", cfg.train_samples);
        r.get_size("calib_samples", cfg.calib_samples);
        r.get_size("probe_samples", cfg.probe_samples);
        r.get_double("probe_scale", cfg.probe_scale);
        r.get_dist("dist", cfg.dist);
        r.get_size("frequency_count", cfg.frequency_count);
        r.get_size("max_frequency", cfg.max_frequency);
        r.get_double("amplitude", cfg.amplitude);
        r.get_size("threads", cfg.threads);
        r.finish(tag);
        out.csv = run_pruning(cfg).csv;
    } else if (tag == "dropout") {
        DropoutConfig cfg;
        r.get_seed("seed", cfg.seed);
        r.get_size("trials", cfg.trials);
        r.get_size("n", cfg.n);
        r.get_size("m", cfg.m);
        r.get_size("d", cfg.d);
        r.get_size("k", cfg.k);
        r.get_doubles("rates", cfg.rates);
        r.get_size("fit_samples", cfg.fit_samples);
        r.get_size("test_samples", cfg.test_samples);
        r.get_dist("dist", cfg.dist);
        r.get_size("frequency_count", cfg.frequency_count);
        r.get_size("max_frequency", cfg.max_frequency);
        r.get_double("amplitude", cfg.amplitude);
        r.get_size("threads", cfg.threads);
        r.finish(tag);
        out.csv = run_dropout(cfg).csv;
    } else if (tag == "memorization") {
        MemorizationConfig cfg;
        r.get_seed("seed", cfg.seed);
        r.get_size("trials", cfg.trials);
        r.get_size("n", cfg.n);
        r.get_size("classes", cfg.classes);
        r.get_size("d", cfg.d);
        r.get_size("k", cfg.k);
        r.get_size("train_samples", cfg.train_samples);
        r.get_size("test_samples", cfg.test_samples);
        r.get_double("separation", cfg.separation);
        r.get_size("frequency_count", cfg.frequency_count);
        r.get_size("max_frequency", cfg.max_frequency);
        r.get_bool("normalize_radius", cfg.normalize_radius);
        r.get_dist("dist", cfg.dist);
        r.get_size("threads", cfg.threads);
        r.finish(tag);
        out.csv = run_memorization(cfg).csv;
    } else if (tag == "lsh_profile") {
        LshProfileConfig cfg;
        r.get_seed("seed", cfg.seed);
        r.get_size("n", cfg.n);
        r.get_size("d", cfg.d);
        r.get_size("k", cfg.k);
        r.get_size("calib_samples", cfg.calib_samples);
        r.get_size("base_count", cfg.base_count);
        r.get_doubles("radii", cfg.radii);
        r.get_size("pairs_per_radius", cfg.pairs_per_radius);
        r.get_dist("dist", cfg.dist);
        r.finish(tag);
        out.csv = run_lsh_profile(cfg).csv;
    } else {
        throw ConfigError(
            "unknown experiment tag '" + tag +
            "' (expected scaling, pruning, dropout, memorization or lsh_profile)");
    }
    return out;
}

}  // namespace eas
