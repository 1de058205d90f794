#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "eas/error.hpp"
#include "eas/experiments.hpp"

using namespace eas;

namespace {

// Count non-comment lines (header + data rows).
std::size_t csv_body_lines(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') ++count;
    }
    return count;
}

bool csv_has_comment(const std::string& csv, const std::string& needle) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#' &&
            line.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

ScalingConfig tiny_scaling() {
    ScalingConfig cfg;
    cfg.seed = 3;
    cfg.trials = 2;
    cfg.n = 10;
    cfg.intrinsic_dims = {1};
    cfg.ks = {8};
    cfg.ds = {40, 80, 160};
    cfg.fit_samples = 200;
    cfg.test_samples = 60;
    cfg.threads = 1;
    return cfg;
}

DropoutConfig tiny_dropout() {
    DropoutConfig cfg;
    cfg.seed = 4;
    cfg.trials = 2;
    cfg.n = 10;
    cfg.d = 256;
    cfg.k = 16;
    cfg.rates = {0.0, 0.5};
    cfg.fit_samples = 300;
    cfg.test_samples = 100;
    cfg.threads = 1;
    return cfg;
}

PruningConfig tiny_pruning() {
    PruningConfig cfg;
    cfg.seed = 5;
    cfg.trials = 2;
    cfg.n = 10;
    cfg.d = 256;
    cfg.k = 1;
    cfg.train_samples = 30;
    cfg.calib_samples = 400;
    cfg.probe_samples = 80;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("ols_slope recovers a perfect line") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> y = {3.0, 5.0, 7.0, 9.0};  // y = 2x + 1
    auto fit = ols_slope(x, y);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.points == 4);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.stderr_slope == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("ols_slope matches a hand-computed noisy fit") {
    // x = {0,1,2,3}, y = {1,2,2,4}: mean x = 1.5, mean y = 2.25,
    // Sxy = 1.875 + 0.125 - 0.125 + 2.625 = 4.5, Sxx = 5 -> slope 0.9
    std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    std::vector<double> y = {1.0, 2.0, 2.0, 4.0};
    auto fit = ols_slope(x, y);
    CHECK(fit.slope == doctest::Approx(0.9).epsilon(1e-12));
    // stderr = sqrt(RSS/(n-2)/Sxx) with residuals off yhat = 2.25 + 0.9(x-1.5)
    double b = 0.9;
    double rss = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double e = y[i] - (2.25 + b * (x[i] - 1.5));
        rss += e * e;
    }
    CHECK(fit.stderr_slope ==
          doctest::Approx(std::sqrt(rss / 2.0 / 5.0)).epsilon(1e-12));
}

TEST_CASE("ols_slope flags impossible fits") {
    std::vector<double> two_x = {1.0, 2.0};
    std::vector<double> two_y = {1.0, 2.0};
    CHECK(ols_slope(two_x, two_y).degenerate);

    std::vector<double> const_x = {1.0, 1.0, 1.0};
    std::vector<double> some_y = {1.0, 2.0, 3.0};
    CHECK(ols_slope(const_x, some_y).degenerate);

    // log of a zero error upstream produces -inf: degenerate, not a crash
    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<double> y = {0.0, 1.0, -std::numeric_limits<double>::infinity()};
    CHECK(ols_slope(x, y).degenerate);
}

TEST_CASE("rank correlation") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> up = {10.0, 20.0, 30.0, 40.0};
    std::vector<double> down = {9.0, 7.0, 5.0, 3.0};
    CHECK(rank_correlation(a, up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rank_correlation(a, down) == doctest::Approx(-1.0).epsilon(1e-12));
    // monotone but nonlinear is still rank-1
    std::vector<double> exp_b = {1.0, 10.0, 100.0, 1000.0};
    CHECK(rank_correlation(a, exp_b) == doctest::Approx(1.0).epsilon(1e-12));
    // ties get average ranks: identical tie structure keeps correlation 1
    std::vector<double> t1 = {1.0, 2.0, 2.0, 3.0};
    std::vector<double> t2 = {10.0, 20.0, 20.0, 40.0};
    CHECK(rank_correlation(t1, t2) == doctest::Approx(1.0).epsilon(1e-12));
    // a constant ladder has no ranking: defined as 0
    std::vector<double> flat = {5.0, 5.0, 5.0, 5.0};
    CHECK(rank_correlation(a, flat) == 0.0);
}

TEST_CASE("scaling experiment row contract") {
    auto cfg = tiny_scaling();
    auto res = run_scaling(cfg);
    // 1 m x 1 k x 3 d x 2 trials = 6 cells, 1 slope row
    CHECK(res.cells.size() == 6);
    REQUIRE(res.slopes.size() == 1);
    CHECK(res.slopes[0].fit.points == 6);
    CHECK_FALSE(res.slopes[0].fit.degenerate);
    // header + 6 cell rows + 1 slope row
    CHECK(csv_body_lines(res.csv) == 8);
    CHECK(csv_has_comment(res.csv, "seed: 3"));
    CHECK(csv_has_comment(res.csv, "trials: 2"));
    CHECK(res.csv.find("row_kind,n,d,k,m,trial,mean_abs_err,max_abs_err,"
                       "no_active_count,slope,slope_stderr,points") !=
          std::string::npos);
    CHECK(res.csv.find("\nslope,") != std::string::npos);

    for (const auto& cell : res.cells) {
        CHECK(cell.stats.mean_abs_err >= 0.0);
        CHECK(cell.stats.max_abs_err >= cell.stats.mean_abs_err);
    }
}

TEST_CASE("scaling experiment config validation") {
    auto cfg = tiny_scaling();
    cfg.ds = {40, 80};  // a slope needs at least 3 distinct sizes
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
    cfg = tiny_scaling();
    cfg.ds = {40, 80, 80};
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
    cfg = tiny_scaling();
    cfg.ks = {0};
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
    cfg = tiny_scaling();
    cfg.intrinsic_dims = {10};  // m must stay below n
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
    cfg = tiny_scaling();
    cfg.ds = {8, 80, 160};  // d must exceed n
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
    cfg = tiny_scaling();
    cfg.trials = 0;
    CHECK_THROWS_AS(run_scaling(cfg), ConfigError);
}

TEST_CASE("scaling output is byte-identical across reruns and thread counts") {
    auto cfg = tiny_scaling();
    auto a = run_scaling(cfg);
    auto b = run_scaling(cfg);
    CHECK(a.csv == b.csv);
    cfg.threads = 2;
    auto c = run_scaling(cfg);
    CHECK(a.csv == c.csv);
}

TEST_CASE("pruning experiment") {
    auto cfg = tiny_pruning();
    auto res = run_pruning(cfg);
    REQUIRE(res.cells.size() == 2);
    for (const auto& cell : res.cells) {
        // training error is bit-identical before and after pruning
        CHECK(cell.train_err_before == cell.train_err_after);
        CHECK(cell.removed_count > 0);
        CHECK(cell.probe_err_before >= 0.0);
        CHECK(cell.probe_err_after >= 0.0);
        CHECK(std::isfinite(cell.probe_err_before));
        CHECK(std::isfinite(cell.probe_err_after));
    }
    CHECK(csv_body_lines(res.csv) == 3);  // header + 2 trial rows
    CHECK(csv_has_comment(res.csv, "d: 256"));

    // rerun: byte-identical
    CHECK(run_pruning(cfg).csv == res.csv);
}

TEST_CASE("pruning with k = d removes nothing") {
    auto cfg = tiny_pruning();
    cfg.d = 64;
    cfg.k = 64;
    cfg.trials = 1;
    auto res = run_pruning(cfg);
    REQUIRE(res.cells.size() == 1);
    // every unit fires on every input when k = d (in-threshold sense the
    // calibration keeps all units alive on train data)
    CHECK(res.cells[0].removed_count == 0);
    CHECK(res.cells[0].train_err_before == res.cells[0].train_err_after);
}

TEST_CASE("dropout experiment") {
    auto cfg = tiny_dropout();
    auto res = run_dropout(cfg);
    REQUIRE(res.cells.size() == 4);  // 2 rates x 2 trials
    for (const auto& cell : res.cells) {
        if (cell.rate == 0.0) {
            // p = 0: both arms are the same model, bit for bit
            CHECK(cell.err_dropout == cell.err_matched);
            CHECK(cell.k_effective == cfg.k);
        } else {
            CHECK(cell.k_effective == 8);  // round(16 * 0.5)
        }
    }
    CHECK(res.rank_correlation >= -1.0);
    CHECK(res.rank_correlation <= 1.0);
    // header + 4 cell rows + 1 summary row
    CHECK(csv_body_lines(res.csv) == 6);
    CHECK(res.csv.find("\nsummary,") != std::string::npos);
    CHECK(run_dropout(cfg).csv == res.csv);
}

TEST_CASE("dropout config validation") {
    auto cfg = tiny_dropout();
    cfg.rates = {0.5, 0.25};  // must increase
    CHECK_THROWS_AS(run_dropout(cfg), ConfigError);
    cfg = tiny_dropout();
    cfg.rates = {0.0, 1.0};  // 1.0 not allowed
    CHECK_THROWS_AS(run_dropout(cfg), ConfigError);
    cfg = tiny_dropout();
    cfg.rates = {0.99};  // k' = round(16*0.01) = 0: no matched arm exists
    CHECK_THROWS_AS(run_dropout(cfg), ConfigError);
}

TEST_CASE("memorization experiment") {
    MemorizationConfig cfg;
    cfg.seed = 6;
    cfg.trials = 2;
    cfg.n = 10;
    cfg.classes = 2;
    cfg.d = 256;
    cfg.k = 8;
    cfg.train_samples = 40;
    cfg.test_samples = 40;
    cfg.threads = 1;
    auto res = run_memorization(cfg);
    REQUIRE(res.cells.size() == 4);  // 2 arms x 2 trials

    double true_train = 0.0, true_test = 0.0, scr_train = 0.0, scr_test = 0.0;
    for (const auto& cell : res.cells) {
        CHECK(cell.train_acc >= 0.0);
        CHECK(cell.train_acc <= 1.0);
        CHECK(cell.test_acc >= 0.0);
        CHECK(cell.test_acc <= 1.0);
        if (cell.scrambled) {
            scr_train += cell.train_acc / 2.0;
            scr_test += cell.test_acc / 2.0;
        } else {
            true_train += cell.train_acc / 2.0;
            true_test += cell.test_acc / 2.0;
        }
    }
    CHECK(res.true_train_acc == doctest::Approx(true_train).epsilon(1e-12));
    CHECK(res.true_test_acc == doctest::Approx(true_test).epsilon(1e-12));
    CHECK(res.scrambled_train_acc == doctest::Approx(scr_train).epsilon(1e-12));
    CHECK(res.scrambled_test_acc == doctest::Approx(scr_test).epsilon(1e-12));
    CHECK(res.scrambled_test_se > 0.0);

    // header + 4 cell rows + 2 summary rows
    CHECK(csv_body_lines(res.csv) == 7);
    CHECK(run_memorization(cfg).csv == res.csv);

    cfg.train_samples = 41;  // must divide evenly among classes
    CHECK_THROWS_AS(run_memorization(cfg), ConfigError);
}

TEST_CASE("clustered classes generator") {
    auto ds = make_clustered_classes(3, 12, 20, 2.5, 2, 4, true, 11, 12);
    CHECK(ds.kind == TaskKind::classification);
    CHECK(ds.num_classes == 3);
    REQUIRE(ds.size() == 60);
    REQUIRE(ds.labels.size() == 60);
    // class-major layout
    for (std::size_t i = 0; i < 60; ++i) {
        CHECK(ds.labels[i] == static_cast<int>(i / 20));
    }
    // deterministic
    auto again = make_clustered_classes(3, 12, 20, 2.5, 2, 4, true, 11, 12);
    CHECK(again.inputs.data == ds.inputs.data);
    // different embedding seed moves the points
    auto moved = make_clustered_classes(3, 12, 20, 2.5, 2, 4, true, 13, 12);
    CHECK(moved.inputs.data != ds.inputs.data);
}

TEST_CASE("lsh profile experiment") {
    LshProfileConfig cfg;
    cfg.seed = 7;
    cfg.n = 10;
    cfg.d = 200;
    cfg.k = 12;
    cfg.calib_samples = 500;
    cfg.radii = {0.0, 0.1, 5.0};
    cfg.pairs_per_radius = 60;
    auto res = run_lsh_profile(cfg);
    REQUIRE(res.profile.bins.size() == 3);
    // zero radius: same input, same code, zero variance
    CHECK(res.profile.bins[0].std_overlap == 0.0);
    CHECK(res.profile.bins[0].mean_overlap > 0.0);
    // any perturbation can only lose overlap relative to eps = 0
    CHECK(res.profile.bins[1].mean_overlap <= res.profile.bins[0].mean_overlap);
    CHECK(res.baseline_pairs == 60);
    CHECK(res.baseline_mean >= 0.0);
    // header + 3 bins + 1 baseline row
    CHECK(csv_body_lines(res.csv) == 5);
    CHECK(res.csv.find("baseline") != std::string::npos);
    CHECK(run_lsh_profile(cfg).csv == res.csv);
}

TEST_CASE("json front door") {
    SUBCASE("unknown tag") {
        CHECK_THROWS_WITH_AS(run_experiment_json("warp", "{}"),
                             doctest::Contains("warp"), ConfigError);
    }
    SUBCASE("malformed json") {
        CHECK_THROWS_AS(run_experiment_json("lsh_profile", "{nope"), ConfigError);
    }
    SUBCASE("non-object json") {
        CHECK_THROWS_AS(run_experiment_json("lsh_profile", "[1,2]"), ConfigError);
    }
    SUBCASE("unknown key") {
        CHECK_THROWS_WITH_AS(
            run_experiment_json("lsh_profile", R"({"warp_factor": 9})"),
            doctest::Contains("warp_factor"), ConfigError);
    }
    SUBCASE("wrong value type") {
        CHECK_THROWS_AS(
            run_experiment_json("lsh_profile", R"({"d": "huge"})"), ConfigError);
    }
    SUBCASE("config document and overrides are applied") {
        std::string config = R"({
            "seed": 7, "n": 10, "d": 200, "k": 12,
            "calib_samples": 500, "radii": [0.0, 0.1, 5.0],
            "pairs_per_radius": 60
        })";
        auto out = run_experiment_json("lsh_profile", config);
        CHECK(out.tag == "lsh_profile");

        LshProfileConfig cfg;
        cfg.seed = 7;
        cfg.n = 10;
        cfg.d = 200;
        cfg.k = 12;
        cfg.calib_samples = 500;
        cfg.radii = {0.0, 0.1, 5.0};
        cfg.pairs_per_radius = 60;
        CHECK(out.csv == run_lsh_profile(cfg).csv);

        // an override wins over the document
        auto out2 = run_experiment_json("lsh_profile", config,
                                        {{"pairs_per_radius", "30"}});
        cfg.pairs_per_radius = 30;
        CHECK(out2.csv == run_lsh_profile(cfg).csv);

        // bare-word values parse where JSON would need quotes
        auto out3 = run_experiment_json("lsh_profile", config,
                                        {{"dist", "gaussian"}});
        CHECK(out3.csv != out.csv);
        CHECK_THROWS_AS(
            run_experiment_json("lsh_profile", config, {{"warp", "1"}}),
            ConfigError);
    }
}

}  // TEST_SUITE
