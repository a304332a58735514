#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srl/canonical.hpp"
#include "srl/common.hpp"
#include "srl/net.hpp"
#include "srl/rng.hpp"
#include "srl/verify.hpp"

using namespace srl;

namespace {

std::vector<std::vector<double>> ball_points(RngStream& rng, int dim, int count) {
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) pts.push_back(rng.in_ball(dim));
    return pts;
}

} // namespace

TEST_CASE("classify: region examples, boundary inclusive") {
    CHECK(classify(std::vector<double>{0.0, 1.0}).region == SphereRegion::Plus);
    CHECK(classify(std::vector<double>{1.0, 0.0}).region == SphereRegion::Zero);
    CHECK(classify(std::vector<double>{kSqrtHalf, -kSqrtHalf}).region == SphereRegion::Minus);
    CHECK(classify(std::vector<double>{-kSqrtHalf, kSqrtHalf}).region == SphereRegion::Plus);
    CHECK_THROWS_AS(classify(std::vector<double>{0.0, 0.0}), ConfigError);
}

TEST_CASE("classify normalizes its input") {
    const auto dir = classify(std::vector<double>{3.0, 4.0, 0.0});
    CHECK(dir.unit[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(dir.unit[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(euclidean_norm(dir.unit) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("to_measure: normalization, merging, dropped atoms") {
    SUBCASE("normalization arithmetic") {
        const auto mu = to_measure(Parameterization(2, {Atom{2.0, {3.0, 4.0, 0.0}}}));
        REQUIRE(mu.atoms().size() == 1);
        CHECK(mu.atoms()[0].coefficient == doctest::Approx(10.0).epsilon(1e-15));
        CHECK(mu.atoms()[0].direction.unit[0] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(mu.atoms()[0].direction.unit[1] == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("same directions merge") {
        const auto mu = to_measure(
            Parameterization(1, {Atom{1.0, {1.0, 0.0}}, Atom{3.0, {2.0, 0.0}}}));
        REQUIRE(mu.atoms().size() == 1);
        CHECK(mu.atoms()[0].coefficient == doctest::Approx(7.0).epsilon(1e-15));
    }
    SUBCASE("zero inner weight dropped") {
        CHECK(to_measure(Parameterization(1, {Atom{5.0, {0.0, 0.0}}})).empty());
    }
    SUBCASE("mass bound") {
        RngStream rng(5, "test.mass");
        for (int t = 0; t < 100; ++t) {
            const Parameterization net = verify::random_network(rng, 2, 10);
            CHECK(to_measure(net).total_variation() <= path_norm(net) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("reduce: antipodal pair gives |x| = 2 relu(x) - x") {
    const auto mu = to_measure(Parameterization(1, {Atom{1.0, {1.0, 0.0}}, Atom{1.0, {-1.0, 0.0}}}));
    const CanonicalForm cf = reduce(mu);
    REQUIRE(cf.ridge.size() == 1);
    CHECK(cf.ridge[0].coefficient == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(cf.linear[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(cf.linear[1] == doctest::Approx(0.0));
    for (double x = -1.0; x <= 1.0; x += 1e-3) {
        CHECK(canonical_evaluate(cf, std::vector<double>{x}) ==
              doctest::Approx(std::abs(x)).epsilon(1e-12));
    }
}

TEST_CASE("reduce: plus atom becomes linear, minus atom vanishes") {
    const CanonicalForm plus = reduce(to_measure(Parameterization(1, {Atom{1.0, {0.0, 1.0}}})));
    CHECK(plus.ridge.empty());
    CHECK(plus.linear[0] == doctest::Approx(0.0));
    CHECK(plus.linear[1] == doctest::Approx(1.0).epsilon(1e-15));

    const CanonicalForm minus = reduce(to_measure(Parameterization(1, {Atom{1.0, {0.0, -1.0}}})));
    CHECK(minus.ridge.empty());
    CHECK(euclidean_norm(minus.linear) == 0.0);
}

TEST_CASE("reduce preserves the function on random networks") {
    RngStream rng(6, "test.reduce");
    for (int t = 0; t < 60; ++t) {
        const int dim = 1 + t % 3;
        const Parameterization net = verify::random_network(rng, dim, 1 + t % 16);
        const double kappa = path_norm(net);
        const CanonicalForm cf = reduce(to_measure(net));
        for (const auto& x : ball_points(rng, dim, 200)) {
            CHECK(std::abs(evaluate(net, x) - canonical_evaluate(cf, x)) <=
                  1e-9 * (1.0 + kappa));
        }
        for (const MeasureAtom& a : cf.ridge)
            CHECK(a.direction.region == SphereRegion::Zero);
    }
}

TEST_CASE("is_zero_function: worked four-atom example") {
    std::vector<MeasureAtom> atoms;
    atoms.push_back({1.0, classify(std::vector<double>{1.0, 0.0})});
    atoms.push_back({-1.0, classify(std::vector<double>{-1.0, 0.0})});
    atoms.push_back({-kSqrtHalf, classify(std::vector<double>{kSqrtHalf, kSqrtHalf})});
    atoms.push_back({kSqrtHalf, classify(std::vector<double>{-kSqrtHalf, kSqrtHalf})});
    const DiscreteMeasure mu(std::move(atoms));
    const auto cert = is_zero_function(mu);
    CHECK(cert.is_zero);
    for (double x = -1.0; x <= 1.0; x += 1e-3)
        CHECK(std::abs(mu.evaluate(std::vector<double>{x})) <= 1e-10);
}

TEST_CASE("is_zero_function: unpaired zero atom fails condition (1)") {
    const DiscreteMeasure mu({MeasureAtom{1.0, classify(std::vector<double>{1.0, 0.0})}});
    const auto cert = is_zero_function(mu);
    CHECK(!cert.is_zero);
    CHECK(!cert.pairing_ok);
    CHECK(cert.failing_atom == 0);
}

TEST_CASE("is_zero_function: empty measure is zero") {
    CHECK(is_zero_function(DiscreteMeasure{}).is_zero);
}

TEST_CASE("is_zero_function: minus atoms are ignored") {
    std::vector<MeasureAtom> atoms;
    atoms.push_back({2.5, classify(std::vector<double>{0.1, -1.0})});
    const auto cert = is_zero_function(DiscreteMeasure(std::move(atoms)));
    CHECK(cert.is_zero);
}

TEST_CASE("zero measures: soundness in both directions") {
    RngStream rng(7, "test.zero");
    for (int t = 0; t < 25; ++t) {
        const int dim = 1 + t % 3;
        const DiscreteMeasure mu = verify::make_zero_measure(rng, dim, 1 + t % 3);
        CHECK(is_zero_function(mu).is_zero);
        double max_abs = 0.0;
        const auto pts = ball_points(rng, dim, 500);
        for (const auto& x : pts) max_abs = std::max(max_abs, std::abs(mu.evaluate(x)));
        CHECK(max_abs <= 1e-9);

        auto atoms = mu.atoms();
        atoms[t % atoms.size()].coefficient += 1e-2;
        const DiscreteMeasure bumped(std::move(atoms));
        CHECK(!is_zero_function(bumped).is_zero);
        double bumped_max = 0.0;
        for (const auto& x : pts) bumped_max = std::max(bumped_max, std::abs(bumped.evaluate(x)));
        CHECK(bumped_max > 1e-4);
    }
}

TEST_CASE("kappa_bounds: the four cases") {
    SUBCASE("case 1: no linear part is exact") {
        CanonicalForm cf;
        cf.ridge.push_back({1.0, classify(std::vector<double>{1.0, 0.0})});
        cf.linear = {0.0, 0.0};
        const KappaBounds kb = kappa_bounds(cf);
        CHECK(kb.lower == 1.0);
        CHECK(kb.upper == 1.0);
    }
    SUBCASE("case 2: linear direction in the plus cap") {
        CanonicalForm cf;
        cf.ridge.push_back({2.0, classify(std::vector<double>{1.0, 0.0})});
        cf.linear = {0.0, 1.5};
        const KappaBounds kb = kappa_bounds(cf);
        CHECK(kb.lower == doctest::Approx(2.0));
        CHECK(kb.upper == doctest::Approx(3.5));
    }
    SUBCASE("case 3: linear part along an existing ridge direction") {
        CanonicalForm cf;
        cf.ridge.push_back({2.0, classify(std::vector<double>{1.0, 0.0})});
        cf.linear = {-1.0, 0.0}; // w = -v_1
        const KappaBounds kb = kappa_bounds(cf);
        CHECK(kb.lower == doctest::Approx(2.0));
        CHECK(kb.upper == doctest::Approx(2.0)); // |2 - 1| + |-1| = 2
    }
    SUBCASE("case 4: fresh nonlinear direction, f(x) = x") {
        CanonicalForm cf;
        cf.linear = {1.0, 0.0};
        const KappaBounds kb = kappa_bounds(cf);
        CHECK(kb.lower == doctest::Approx(1.0));
        CHECK(kb.upper == doctest::Approx(2.0));
    }
    SUBCASE("zero function") {
        CanonicalForm cf;
        cf.linear = {0.0, 0.0};
        const KappaBounds kb = kappa_bounds(cf);
        CHECK(kb.lower == 0.0);
        CHECK(kb.upper == 0.0);
    }
}

TEST_CASE("kappa_bounds: factor-3 sandwich on random instances") {
    RngStream rng(8, "test.sandwich");
    for (int t = 0; t < 300; ++t) {
        const int dim = 1 + t % 3;
        const Parameterization net = verify::random_network(rng, dim, 1 + t % 24);
        const KappaBounds kb = kappa_bounds(reduce(to_measure(net)));
        CHECK(kb.lower <= kb.upper * (1.0 + 1e-12));
        CHECK(kb.upper <= 3.0 * kb.lower + 1e-12);
    }
}

TEST_CASE("kappa_upper_via_theorem: worked examples") {
    const Parameterization pair(1, {Atom{1.0, {1.0, 0.0}}, Atom{1.0, {-1.0, 0.0}}});
    CHECK(kappa_upper_via_theorem(pair) == doctest::Approx(2.0).epsilon(1e-15));
    const Parameterization single(1, {Atom{1.0, {1.0, 0.0}}});
    CHECK(kappa_upper_via_theorem(single) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kappa_upper_via_theorem(Parameterization::zero(1)) == 0.0);
}

TEST_CASE("kappa_upper_via_theorem never exceeds 3x the lower bound") {
    RngStream rng(9, "test.upper");
    for (int t = 0; t < 200; ++t) {
        const Parameterization net = verify::random_network(rng, 1 + t % 3, 1 + t % 10);
        const KappaBounds kb = kappa_bounds(reduce(to_measure(net)));
        CHECK(kappa_upper_via_theorem(net) <= 3.0 * kb.lower + 1e-12);
    }
}

TEST_CASE("render/reduce idempotence") {
    RngStream rng(10, "test.idem");
    for (int t = 0; t < 40; ++t) {
        const int dim = 1 + t % 3;
        CanonicalForm cf;
        for (int k = 0; k < 1 + t % 5; ++k) {
            std::vector<double> v;
            do {
                v = rng.on_sphere(dim + 1);
            } while (std::abs(v.back()) > kSqrtHalf - 0.05);
            double c = rng.normal();
            if (std::abs(c) < 0.1) c = -0.7;
            cf.ridge.push_back({c, classify(v)});
        }
        cf.linear.assign(dim + 1, 0.0);
        for (double& c : cf.linear) c = rng.normal();

        const CanonicalForm back = reduce(to_measure(render(cf, dim)));
        REQUIRE(back.ridge.size() == cf.ridge.size());
        for (const MeasureAtom& orig : cf.ridge) {
            bool found = false;
            for (const MeasureAtom& got : back.ridge)
                if (same_direction(orig.direction, got.direction) &&
                    std::abs(orig.coefficient - got.coefficient) <= 1e-10)
                    found = true;
            CHECK(found);
        }
        for (std::size_t i = 0; i < cf.linear.size(); ++i)
            CHECK(std::abs(cf.linear[i] - back.linear[i]) <= 1e-10);
    }
}

TEST_CASE("discrete measure construction merges and drops by tolerance") {
    std::vector<MeasureAtom> atoms;
    atoms.push_back({1.0, classify(std::vector<double>{1.0, 0.0})});
    atoms.push_back({-1.0 + 5e-15, classify(std::vector<double>{1.0, 0.0})});
    const DiscreteMeasure mu(std::move(atoms));
    CHECK(mu.empty()); // merged coefficient 5e-15 is below the drop tolerance
}
