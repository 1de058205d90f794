#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "eas/csv.hpp"
#include "eas/data.hpp"
#include "eas/error.hpp"
#include "eas/rng.hpp"

using namespace eas;

namespace {

std::string temp_path(const std::string& name) {
    return "/tmp/eas_data_test_" + name;
}

// Largest covariance eigenvalue over trace for a point cloud, via power
// iteration on the (small) covariance matrix: near 1 when the cloud is
// locally one-dimensional.
double top_eigen_fraction(const Matrix& pts) {
    const std::size_t n = pts.cols, m = pts.rows;
    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < n; ++a) mean[a] += pts.at(i, a);
    }
    for (double& x : mean) x /= static_cast<double>(m);
    std::vector<double> cov(n * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            double da = pts.at(i, a) - mean[a];
            for (std::size_t b = 0; b < n; ++b) {
                cov[a * n + b] += da * (pts.at(i, b) - mean[b]);
            }
        }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < n; ++a) trace += cov[a * n + a];
    if (trace <= 0.0) return 0.0;

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> av(n);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t a = 0; a < n; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < n; ++b) s += cov[a * n + b] * v[b];
            av[a] = s;
        }
        double norm = 0.0;
        for (double x : av) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t a = 0; a < n; ++a) v[a] = av[a] / norm;
        lambda = norm;
    }
    return lambda / trace;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("spec validation") {
    ManifoldSpec spec;
    spec.intrinsic_dim = 0;
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec.intrinsic_dim = 3;
    spec.ambient_dim = 3;
    CHECK_THROWS_AS(validate(spec), ConfigError);  // need n > m
    spec.ambient_dim = 8;
    CHECK_NOTHROW(validate(spec));
    spec.embedding = EmbeddingKind::circle;
    CHECK_THROWS_AS(validate(spec), ConfigError);  // circle is a curve: m = 1
    spec.intrinsic_dim = 1;
    CHECK_NOTHROW(validate(spec));
    spec.frequency_count = 0;
    spec.embedding = EmbeddingKind::random_trig;
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec.frequency_count = 3;
    spec.max_frequency = 0;
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec.max_frequency = 3;
    spec.amplitude = 0.0;
    CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("circle embedding, hand-checked") {
    ManifoldSpec spec;
    spec.intrinsic_dim = 1;
    spec.ambient_dim = 4;
    spec.amplitude = 2.5;
    spec.embedding = EmbeddingKind::circle;

    std::vector<double> t0 = {0.0};
    auto p0 = embed_latent(spec, t0);
    REQUIRE(p0.size() == 4);
    CHECK(p0[0] == 2.5);
    CHECK(p0[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p0[2] == 0.0);
    CHECK(p0[3] == 0.0);

    std::vector<double> tq = {0.25};
    auto pq = embed_latent(spec, tq);
    CHECK(pq[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(pq[1] == doctest::Approx(2.5).epsilon(1e-15));

    // all samples live on the radius-2.5 circle
    auto sample = sample_manifold(spec, 50, 9);
    for (std::size_t i = 0; i < 50; ++i) {
        double r = std::hypot(sample.points.at(i, 0), sample.points.at(i, 1));
        CHECK(r == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("sampling is deterministic and matches embed_latent") {
    ManifoldSpec spec;
    spec.intrinsic_dim = 2;
    spec.ambient_dim = 7;
    spec.embedding_seed = 33;

    auto s1 = sample_manifold(spec, 40, 5);
    auto s2 = sample_manifold(spec, 40, 5);
    CHECK(s1.points.data == s2.points.data);
    CHECK(s1.latents.data == s2.latents.data);
    auto s3 = sample_manifold(spec, 40, 6);
    CHECK(s1.points.data != s3.points.data);

    REQUIRE(s1.latents.rows == 40);
    REQUIRE(s1.latents.cols == 2);
    for (double t : s1.latents.data) {
        CHECK(t >= 0.0);
        CHECK(t < 1.0);
    }
    // the batch path and the single-point path agree bit for bit
    for (std::size_t i = 0; i < 40; ++i) {
        auto p = embed_latent(spec, s1.latents.row(i));
        for (std::size_t a = 0; a < 7; ++a) CHECK(p[a] == s1.points.at(i, a));
    }
}

TEST_CASE("embedding is smooth: nearby latents map to nearby points") {
    ManifoldSpec spec;
    spec.intrinsic_dim = 1;
    spec.ambient_dim = 10;
    spec.embedding_seed = 77;

    // a tight latent window lands on an approximately linear patch: the top
    // covariance direction carries almost all the variance
    Matrix patch(60, 10);
    for (std::size_t i = 0; i < 60; ++i) {
        double t = 0.4 + 0.0004 * static_cast<double>(i) / 60.0;
        std::vector<double> lt = {t};
        auto p = embed_latent(spec, lt);
        std::copy(p.begin(), p.end(), patch.row(i).begin());
    }
    CHECK(top_eigen_fraction(patch) > 0.9);
}

TEST_CASE("target families") {
    SUBCASE("linear") {
        auto f = make_linear_target({2.0, -1.0, 0.5});
        std::vector<double> u = {1.0, 2.0, 4.0};
        CHECK(f(u) == 2.0 * 1.0 - 1.0 * 2.0 + 0.5 * 4.0);
        CHECK(f.lipschitz == doctest::Approx(std::sqrt(5.25)).epsilon(1e-15));
        CHECK(f.tag == "linear");
    }
    SUBCASE("trig target respects its recorded Lipschitz constant") {
        auto f = make_lipschitz_trig_target(5, 4, 11);
        CHECK(f.lipschitz > 0.0);
        Rng rng(12);
        std::vector<double> u(5), v(5);
        for (int trial = 0; trial < 300; ++trial) {
            for (std::size_t a = 0; a < 5; ++a) {
                u[a] = rng.normal();
                v[a] = u[a] + 0.1 * rng.normal();
            }
            double du = 0.0;
            for (std::size_t a = 0; a < 5; ++a) {
                du += (u[a] - v[a]) * (u[a] - v[a]);
            }
            du = std::sqrt(du);
            CHECK(std::fabs(f(u) - f(v)) <= f.lipschitz * du + 1e-12);
        }
    }
    SUBCASE("region-constant target returns the nearest anchor's value") {
        Matrix anchors(3, 2);
        anchors.at(0, 0) = 0.0;
        anchors.at(0, 1) = 0.0;
        anchors.at(1, 0) = 10.0;
        anchors.at(1, 1) = 0.0;
        anchors.at(2, 0) = 0.0;
        anchors.at(2, 1) = 10.0;
        auto f = make_region_constant_target(anchors, {1.0, 2.0, 3.0});
        CHECK(std::isnan(f.lipschitz));
        std::vector<double> near0 = {1.0, 1.0};
        std::vector<double> near1 = {9.0, 1.0};
        std::vector<double> near2 = {1.0, 9.0};
        CHECK(f(near0) == 1.0);
        CHECK(f(near1) == 2.0);
        CHECK(f(near2) == 3.0);
        // equidistant between anchors 0 and 1: lowest index wins
        std::vector<double> mid = {5.0, 0.0};
        CHECK(f(mid) == 1.0);
    }
    SUBCASE("make_target is deterministic in the seed") {
        for (TargetTag tag :
             {TargetTag::lipschitz_trig, TargetTag::region_constant, TargetTag::linear}) {
            auto f = make_target(tag, 6, 21);
            auto g = make_target(tag, 6, 21);
            auto h = make_target(tag, 6, 22);
            Rng rng(1);
            bool any_differ = false;
            for (int i = 0; i < 20; ++i) {
                std::vector<double> u(6);
                for (double& x : u) x = rng.normal();
                CHECK(f(u) == g(u));
                if (f(u) != h(u)) any_differ = true;
            }
            CHECK(any_differ);
        }
    }
}

TEST_CASE("label scrambling") {
    Dataset ds;
    ds.kind = TaskKind::classification;
    ds.num_classes = 10;
    ds.inputs = Matrix(10000, 3);
    Rng rng(5);
    for (double& x : ds.inputs.data) x = rng.normal();
    ds.labels.assign(10000, 0);
    ds.provenance = "synthetic";

    auto scr = scramble_labels(ds, 99);
    CHECK(scr.inputs.data == ds.inputs.data);  // inputs byte-identical
    CHECK(scr.num_classes == 10);
    CHECK(scr.kind == TaskKind::classification);
    CHECK(scr.provenance == "synthetic+scrambled");
    REQUIRE(scr.labels.size() == 10000);

    std::size_t agree = 0;
    std::vector<std::size_t> hist(10, 0);
    for (std::size_t i = 0; i < scr.labels.size(); ++i) {
        REQUIRE(scr.labels[i] >= 0);
        REQUIRE(scr.labels[i] < 10);
        ++hist[static_cast<std::size_t>(scr.labels[i])];
        if (scr.labels[i] == ds.labels[i]) ++agree;
    }
    // uniform scrambling agrees with the old labels ~1/10 of the time
    CHECK(agree > 800);
    CHECK(agree < 1200);
    for (std::size_t c = 0; c < 10; ++c) CHECK(hist[c] > 800);

    // deterministic in the seed
    auto scr2 = scramble_labels(ds, 99);
    CHECK(scr2.labels == scr.labels);

    Dataset reg;
    reg.kind = TaskKind::regression;
    reg.inputs = Matrix(3, 2);
    reg.targets = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(scramble_labels(reg, 1), ConfigError);
}

TEST_CASE("csv loading") {
    const std::string path = temp_path("load.csv");
    write_text_file(path,
                    "x,y,target,extra\n"
                    "1.5,-2,0.25,ignored\n"
                    "3e2,0.125,-1,ignored\n");
    CsvColumnMap map;
    map.feature_columns = {"x", "y"};
    map.target_column = "target";

    SUBCASE("literal cell values") {
        auto ds = load_csv(path, map);
        REQUIRE(ds.size() == 2);
        REQUIRE(ds.inputs.cols == 2);
        CHECK(ds.inputs.at(0, 0) == 1.5);
        CHECK(ds.inputs.at(0, 1) == -2.0);
        CHECK(ds.inputs.at(1, 0) == 300.0);
        CHECK(ds.inputs.at(1, 1) == 0.125);
        CHECK(ds.targets == std::vector<double>{0.25, -1.0});
        CHECK(ds.kind == TaskKind::regression);
    }
    SUBCASE("column order follows the map, not the file") {
        CsvColumnMap swapped = map;
        swapped.feature_columns = {"y", "x"};
        auto ds = load_csv(path, swapped);
        CHECK(ds.inputs.at(0, 0) == -2.0);
        CHECK(ds.inputs.at(0, 1) == 1.5);
    }
    SUBCASE("standardization") {
        CsvColumnMap std_map = map;
        std_map.standardize = true;
        auto ds = load_csv(path, std_map);
        for (std::size_t a = 0; a < 2; ++a) {
            double mean = (ds.inputs.at(0, a) + ds.inputs.at(1, a)) / 2.0;
            double var = (ds.inputs.at(0, a) * ds.inputs.at(0, a) +
                          ds.inputs.at(1, a) * ds.inputs.at(1, a)) /
                             2.0 -
                         mean * mean;
            CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("csv loading failure modes") {
    CsvColumnMap map;
    map.feature_columns = {"x", "y"};
    map.target_column = "target";

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv(temp_path("missing.csv"), map), IoError);
    }
    SUBCASE("missing column") {
        const std::string path = temp_path("nocol.csv");
        write_text_file(path, "x,target\n1,2\n");
        CHECK_THROWS_WITH_AS(load_csv(path, map),
                             doctest::Contains("y"), IngestionError);
    }
    SUBCASE("bad cell names its physical row and column") {
        const std::string path = temp_path("badcell.csv");
        write_text_file(path, "x,y,target\n1,2,3\n4,oops,6\n");
        try {
            load_csv(path, map);
            FAIL("expected IngestionError");
        } catch (const IngestionError& e) {
            std::string msg = e.what();
            CHECK(msg.find("row 3") != std::string::npos);
            CHECK(msg.find("y") != std::string::npos);
        }
    }
    SUBCASE("ragged row") {
        const std::string path = temp_path("ragged.csv");
        write_text_file(path, "x,y,target\n1,2,3\n4,5\n");
        CHECK_THROWS_WITH_AS(load_csv(path, map),
                             doctest::Contains("row 3"), IngestionError);
    }
    SUBCASE("empty file") {
        const std::string path = temp_path("empty.csv");
        write_text_file(path, "");
        CHECK_THROWS_AS(load_csv(path, map), IngestionError);
    }
    SUBCASE("classification labels must be non-negative integers") {
        const std::string path = temp_path("labels.csv");
        write_text_file(path, "x,y,target\n1,2,0\n3,4,2\n");
        CsvColumnMap cmap = map;
        cmap.kind = TaskKind::classification;
        auto ds = load_csv(path, cmap);
        CHECK(ds.labels == std::vector<int>{0, 2});
        CHECK(ds.num_classes == 3);  // max label + 1

        write_text_file(path, "x,y,target\n1,2,0.5\n");
        CHECK_THROWS_AS(load_csv(path, cmap), IngestionError);
        write_text_file(path, "x,y,target\n1,2,-1\n");
        CHECK_THROWS_AS(load_csv(path, cmap), IngestionError);
    }
    SUBCASE("crlf and trailing newline are tolerated") {
        const std::string path = temp_path("crlf.csv");
        write_text_file(path, "x,y,target\r\n1,2,3\r\n\n");
        auto ds = load_csv(path, map);
        REQUIRE(ds.size() == 1);
        CHECK(ds.inputs.at(0, 0) == 1.0);
    }
}

TEST_CASE("save then load round-trips every value exactly") {
    Dataset ds;
    ds.kind = TaskKind::regression;
    ds.inputs = Matrix(25, 4);
    ds.targets.resize(25);
    Rng rng(31);
    for (double& x : ds.inputs.data) x = rng.normal() * 1e3;
    for (double& t : ds.targets) t = rng.normal() * 1e-3;

    const std::string path = temp_path("roundtrip.csv");
    save_csv(ds, path);
    CsvColumnMap map;
    map.feature_columns = {"f0", "f1", "f2", "f3"};
    map.target_column = "target";
    auto back = load_csv(path, map);
    REQUIRE(back.size() == 25);
    CHECK(back.inputs.data == ds.inputs.data);  // %.17g round-trips doubles
    CHECK(back.targets == ds.targets);

    // classification datasets round-trip labels through the label column
    Dataset cls;
    cls.kind = TaskKind::classification;
    cls.num_classes = 4;
    cls.inputs = Matrix(8, 2);
    for (double& x : cls.inputs.data) x = rng.normal();
    cls.labels = {0, 1, 2, 3, 0, 1, 2, 3};
    const std::string cpath = temp_path("roundtrip_cls.csv");
    save_csv(cls, cpath);
    CsvColumnMap cmap;
    cmap.feature_columns = {"f0", "f1"};
    cmap.target_column = "label";
    cmap.kind = TaskKind::classification;
    auto cback = load_csv(cpath, cmap);
    CHECK(cback.labels == cls.labels);
    CHECK(cback.num_classes == 4);
    CHECK(cback.inputs.data == cls.inputs.data);
}

}  // TEST_SUITE
