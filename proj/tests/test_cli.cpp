#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "doctest.h"
#include "eas/cli.hpp"
#include "eas/csv.hpp"

using namespace eas;

namespace {

int run(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"eas"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string temp_path(const std::string& name) {
    return "/tmp/eas_cli_test_" + name;
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return static_cast<bool>(in);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen, fit, eval, inspect pipeline") {
    const std::string data = temp_path("pipe.csv");
    const std::string model = temp_path("pipe.model");

    CHECK(run({"gen", "--out", data.c_str(), "--n", "6", "--count", "300",
               "--seed", "5"}) == 0);
    REQUIRE(file_exists(data));

    CHECK(run({"fit", "--data", data.c_str(), "--out", model.c_str(), "--d",
               "128", "--k", "8", "--seed", "9"}) == 0);
    REQUIRE(file_exists(model));

    CHECK(run({"eval", "--data", data.c_str(), "--model", model.c_str()}) == 0);
    CHECK(run({"inspect", "--model", model.c_str()}) == 0);

    SUBCASE("binary encoding round-trips through the cli") {
        const std::string bmodel = temp_path("pipe_bin.model");
        CHECK(run({"fit", "--data", data.c_str(), "--out", bmodel.c_str(),
                   "--d", "128", "--k", "8", "--seed", "9", "--encoding",
                   "binary"}) == 0);
        CHECK(run({"inspect", "--model", bmodel.c_str()}) == 0);
    }
    SUBCASE("classification generation") {
        const std::string cdata = temp_path("pipe_cls.csv");
        CHECK(run({"gen", "--out", cdata.c_str(), "--kind", "classification",
                   "--n", "8", "--count", "40", "--classes", "4", "--seed",
                   "3"}) == 0);
        auto text = slurp(cdata);
        CHECK(text.find("label") != std::string::npos);
    }
}

TEST_CASE("experiment subcommand writes the csv") {
    const std::string out = temp_path("exp.csv");
    CHECK(run({"experiment", "lsh_profile", "--out", out.c_str(), "--set",
               "n=10", "--set", "d=200", "--set", "k=12", "--set",
               "calib_samples=400", "--set", "pairs_per_radius=50", "--set",
               "radii=[0.0,0.5]"}) == 0);
    auto text = slurp(out);
    CHECK(text.find("row_kind,bin_lo,bin_hi,mean,std,count") != std::string::npos);
    CHECK(text.find("baseline") != std::string::npos);
    CHECK(text.find("# pairs_per_radius: 50") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
    // unknown subcommand
    CHECK(run({"transmogrify"}) == 2);
    // unknown flag
    CHECK(run({"gen", "--out", "/tmp/x.csv", "--warp", "9"}) == 2);
    // unknown experiment tag
    CHECK(run({"experiment", "warp", "--out", temp_path("w.csv").c_str()}) == 2);
    // malformed --set
    CHECK(run({"experiment", "lsh_profile", "--set", "novalue"}) == 2);
    // unknown config key
    CHECK(run({"experiment", "lsh_profile", "--set", "warp=1"}) == 2);
    // sigma only applies to gaussian rows
    const std::string data = temp_path("sigma.csv");
    REQUIRE(run({"gen", "--out", data.c_str(), "--n", "5", "--count", "50",
                 "--seed", "2"}) == 0);
    CHECK(run({"fit", "--data", data.c_str(), "--out", temp_path("s.model").c_str(),
               "--d", "64", "--dist", "unit_sphere", "--sigma", "0.5"}) == 2);
    // scaling requires at least 3 distinct d values
    CHECK(run({"experiment", "scaling", "--out", temp_path("sc.csv").c_str(),
               "--set", "ds=[64,128]"}) == 2);
    // gen count must divide by classes
    CHECK(run({"gen", "--out", temp_path("c.csv").c_str(), "--kind",
               "classification", "--n", "8", "--count", "41", "--classes",
               "4"}) == 2);
}

TEST_CASE("data errors exit with 3") {
    const std::string bad = temp_path("bad.csv");
    write_text_file(bad, "x,y,target\n1,oops,3\n");
    CHECK(run({"fit", "--data", bad.c_str(), "--out",
               temp_path("b.model").c_str(), "--d", "64"}) == 3);

    // missing requested column
    write_text_file(bad, "x,target\n1,2\n");
    CHECK(run({"fit", "--data", bad.c_str(), "--out",
               temp_path("b.model").c_str(), "--d", "64", "--features",
               "x,y"}) == 3);
}

TEST_CASE("io errors exit with 4") {
    CHECK(run({"inspect", "--model", temp_path("nonexistent.model").c_str()}) == 4);
    CHECK(run({"fit", "--data", temp_path("nonexistent.csv").c_str(), "--out",
               temp_path("n.model").c_str(), "--d", "64"}) == 4);
}

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({"fit", "--help"}) == 0);
}

}  // TEST_SUITE
