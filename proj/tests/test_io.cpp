#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "srl/common.hpp"
#include "srl/dataset.hpp"
#include "srl/model_io.hpp"
#include "srl/net.hpp"
#include "srl/rng.hpp"
#include "srl/verify.hpp"

using namespace srl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/srl_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("model json: bit-exact round trip of awkward doubles") {
    std::vector<Atom> atoms;
    RngStream rng(50, "test.io");
    for (int i = 0; i < 32; ++i) {
        Atom a;
        a.outer = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform_int(-300, 300)));
        a.inner = {rng.normal(), 0.1 + rng.uniform01(), -0.0};
        atoms.push_back(a);
    }
    atoms.push_back(Atom{0.1, {1.0 / 3.0, 5e-324 * 2, 1.7976931348623157e308 / 2}});
    const Parameterization net(2, atoms);

    TempFile f("model.json");
    save_model(net, f.path);
    const Parameterization back = load_model(f.path);
    REQUIRE(back.width() == net.width());
    CHECK(back.dim_input() == 2);
    for (std::size_t i = 0; i < net.width(); ++i) {
        CHECK(back.atoms()[i].outer == net.atoms()[i].outer);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(back.atoms()[i].inner[k] == net.atoms()[i].inner[k]);
    }
}

TEST_CASE("model json: malformed documents raise parse errors") {
    TempFile f("bad.json");
    {
        std::ofstream out(f.path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_model(f.path), ConfigError);
    {
        std::ofstream out(f.path);
        out << R"({"format_version":1,"atoms":[]})"; // missing dim_input
    }
    CHECK_THROWS_AS(load_model(f.path), ConfigError);
    CHECK_THROWS_AS(load_model("/tmp/definitely_missing_srl.json"), ConfigError);
    CHECK_THROWS_AS(model_from_json_string("[1,2,3]"), ConfigError);
}

TEST_CASE("model json: canonical augmentation carries the interval") {
    RngStream rng(51, "test.io2");
    const Parameterization net = verify::random_network(rng, 1, 6);
    const CanonicalForm cf = reduce(to_measure(net));
    const KappaBounds kb = kappa_bounds(cf);
    TempFile f("canon.json");
    save_model_with_canonical(net, cf, kb, false, f.path);

    std::ifstream in(f.path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("\"canonical\"") != std::string::npos);
    CHECK(text.find("\"ridge\"") != std::string::npos);
    CHECK(text.find("\"linear\"") != std::string::npos);
    CHECK(text.find("\"kappa\"") != std::string::npos);
    CHECK(text.find("\"format_version\"") != std::string::npos);
    // The base model is still loadable.
    const Parameterization back = load_model(f.path);
    CHECK(back.width() == net.width());
}

TEST_CASE("dataset csv: round trip preserves values bit-exactly") {
    RngStream rng(52, "test.io3");
    std::vector<Point> xs;
    std::vector<double> ys;
    for (int i = 0; i < 64; ++i) {
        xs.push_back(Point{rng.in_ball(2)});
        ys.push_back(rng.uniform(-1.0, 1.0));
    }
    const Dataset data(2, xs, ys, 1.0);
    TempFile f("data.csv");
    save_dataset_csv(data, f.path);
    const Dataset back = load_dataset_csv(f.path);
    REQUIRE(back.size() == data.size());
    CHECK(back.dim_input() == 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(back.labels()[i] == data.labels()[i]);
        CHECK(back.points()[i].coords == data.points()[i].coords);
    }
}

TEST_CASE("dataset csv: malformed input names the line") {
    TempFile f("bad.csv");
    {
        std::ofstream out(f.path);
        out << "x1,y\n0.5,0.25\noops,1\n";
    }
    try {
        (void)load_dataset_csv(f.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    {
        std::ofstream out(f.path);
        out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(load_dataset_csv(f.path), ConfigError); // header must end in y
}

TEST_CASE("rng streams: named streams are independent and reproducible") {
    RngStream a(99, "alpha");
    RngStream a2(99, "alpha");
    RngStream b(99, "beta");
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        if (x != a2.next_u64()) all_equal = false;
        if (x != b.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);

    RngStream c(99, "alpha", 1);
    RngStream c0(99, "alpha", 0);
    CHECK(c.next_u64() != c0.next_u64());
}

TEST_CASE("rng: uniform ball points stay in the ball, sphere points on it") {
    RngStream rng(7, "test.ball");
    for (int t = 0; t < 1000; ++t) {
        const auto x = rng.in_ball(3);
        CHECK(euclidean_norm(x) <= 1.0 + 1e-12);
        const auto s = rng.on_sphere(4);
        CHECK(euclidean_norm(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rng: normals have sane first two moments") {
    RngStream rng(8, "test.normal");
    const int n = 200000;
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        mean += z;
        sq += z * z;
    }
    mean /= n;
    sq /= n;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sq - 1.0) <= 5.0 / std::sqrt(static_cast<double>(n)));
}
