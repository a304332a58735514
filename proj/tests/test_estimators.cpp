#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srl/common.hpp"
#include "srl/dataset.hpp"
#include "srl/estimators.hpp"
#include "srl/net.hpp"
#include "srl/rng.hpp"
#include "srl/verify.hpp"

using namespace srl;

namespace {

Dataset three_point_data() {
    return {1, {Point{{0.0}}, Point{{1.0}}, Point{{-1.0}}}, {0.0, 1.0, 0.0}, 1.0};
}

} // namespace

TEST_CASE("empirical_mse: worked examples") {
    const Dataset ones(1, {Point{{0.0}}, Point{{0.5}}}, {1.0, 1.0}, 1.0);
    CHECK(empirical_mse(Parameterization::zero(1), ones) == doctest::Approx(1.0));

    const Parameterization relu(1, {Atom{1.0, {1.0, 0.0}}});
    const Dataset interp(1, {Point{{0.0}}, Point{{1.0}}}, {0.0, 1.0}, 1.0);
    CHECK(empirical_mse(relu, interp) == 0.0);

    const Dataset off(1, {Point{{1.0}}}, {0.0}, 1.0);
    CHECK(empirical_mse(relu, off) == doctest::Approx(1.0));
}

TEST_CASE("empirical_mse: dimension mismatch") {
    const Dataset data(2, {Point{{0.0, 0.0}}}, {0.0}, 1.0);
    CHECK_THROWS_AS(empirical_mse(Parameterization::zero(1), data), ConfigError);
}

TEST_CASE("dataset construction enforces the invariants") {
    CHECK_THROWS_AS(Dataset(1, {}, {}, 1.0), ConfigError);
    CHECK_THROWS_AS(Dataset(1, {Point{{2.0}}}, {0.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(Dataset(1, {Point{{0.0}}}, {2.0}, 1.0), ConfigError);
}

TEST_CASE("project_kappa_ball: scaling and identity") {
    const Parameterization net(1, {Atom{5.0, {2.0, 0.0}}}); // kappa = 10
    const Parameterization proj = project_kappa_ball(net, 5.0);
    CHECK(path_norm(proj) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(proj.atoms()[0].outer == doctest::Approx(2.5).epsilon(1e-15));

    const Parameterization inside(1, {Atom{1.0, {1.0, 0.0}}});
    const Parameterization same = project_kappa_ball(inside, 5.0);
    CHECK(same.atoms()[0].outer == 1.0);

    const Parameterization zero = project_kappa_ball(Parameterization::zero(1), 1.0);
    CHECK(zero.width() == 0);
}

TEST_CASE("project_kappa_ball: kappa of the output is min(kappa, M)") {
    RngStream rng(21, "test.project");
    for (int t = 0; t < 200; ++t) {
        const Parameterization net = verify::random_network(rng, 2, 6);
        const double kappa = path_norm(net);
        const double m = rng.uniform(0.05, 2.0 * kappa + 0.1);
        const double got = path_norm(project_kappa_ball(net, m));
        CHECK(std::abs(got - std::min(kappa, m)) <= 1e-12 * (1.0 + kappa));
    }
}

TEST_CASE("fit: constrained mode reaches the feasible target") {
    FitConfig cfg;
    cfg.width = 4;
    cfg.mode = FitMode::Constrained;
    cfg.constraint = 2.0;
    cfg.seed = 7;
    const FitResult result = fit(three_point_data(), cfg);
    CHECK(result.train_mse <= 1e-4);
    CHECK(path_norm(result.net) <= 2.0 * (1.0 + 1e-9));
    CHECK(result.objective == doctest::Approx(result.train_mse + result.penalty_value)
                                  .epsilon(1e-10));
}

TEST_CASE("fit: all-zero labels under the path penalty collapse to zero") {
    const Dataset zeros(1, {Point{{0.2}}, Point{{-0.5}}, Point{{0.9}}}, {0.0, 0.0, 0.0}, 1.0);
    for (double lambda : {0.01, 0.3}) {
        FitConfig cfg;
        cfg.width = 6;
        cfg.mode = FitMode::PathRegularized;
        cfg.lambda = lambda;
        cfg.seed = 3;
        const FitResult result = fit(zeros, cfg);
        CHECK(result.objective <= lambda * 1e-6);
    }
}

TEST_CASE("fit: l2 objective equals path objective after balancing") {
    FitConfig cfg;
    cfg.width = 6;
    cfg.mode = FitMode::L2Regularized;
    cfg.lambda = 0.05;
    cfg.seed = 11;
    const Dataset data = three_point_data();
    const FitResult result = fit(data, cfg);
    const Parameterization balanced = rescale_balanced(result.net);
    const double path_obj = empirical_mse(balanced, data) + cfg.lambda * path_norm(balanced);
    const double l2_obj = empirical_mse(balanced, data) +
                          0.5 * cfg.lambda * param_sq_norm(balanced);
    CHECK(std::abs(path_obj - l2_obj) <= 1e-9 * (1.0 + path_obj));
    // Balancing never increases the weight-decay objective.
    const double l2_raw = empirical_mse(result.net, data) +
                          0.5 * cfg.lambda * param_sq_norm(result.net);
    CHECK(l2_obj <= l2_raw + 1e-12);
}

TEST_CASE("fit: objective recomputes from the returned net") {
    const Dataset data = three_point_data();
    for (FitMode mode : {FitMode::Constrained, FitMode::PathRegularized, FitMode::L2Regularized}) {
        FitConfig cfg;
        cfg.width = 4;
        cfg.mode = mode;
        cfg.constraint = 2.0;
        cfg.lambda = 0.02;
        cfg.seed = 5;
        const FitResult result = fit(data, cfg);
        const double mse = empirical_mse(result.net, data);
        double penalty = 0.0;
        if (mode == FitMode::PathRegularized) penalty = cfg.lambda * path_norm(result.net);
        if (mode == FitMode::L2Regularized) penalty = 0.5 * cfg.lambda * param_sq_norm(result.net);
        CHECK(std::abs(result.objective - (mse + penalty)) <= 1e-10 * (1.0 + result.objective));
    }
}

TEST_CASE("fit: per-epoch monotone descent in constrained mode (shipped defaults)") {
    // Determinism makes a k-epoch run the prefix of a (k+1)-epoch run, so
    // sweeping k checks the objective after every single epoch.
    const std::vector<Dataset> datasets{
        three_point_data(),
        Dataset(1, {Point{{0.2}}, Point{{-0.5}}, Point{{0.9}}}, {0.0, 0.0, 0.0}, 1.0),
        Dataset(1, {Point{{0.0}}, Point{{0.5}}, Point{{1.0}}, Point{{-0.7}}},
                {0.1, 0.6, 0.9, -0.2}, 1.0)};
    for (const Dataset& data : datasets) {
        FitConfig cfg;
        cfg.width = 4;
        cfg.mode = FitMode::Constrained;
        cfg.constraint = 2.0;
        cfg.seed = 7;
        cfg.opt.restarts = 1;
        cfg.opt.tolerance = 0.0;
        double prev = 1e300;
        for (int epochs = 1; epochs <= 150; ++epochs) {
            cfg.opt.max_epochs = epochs;
            const FitResult result = fit(data, cfg);
            CHECK(result.objective <= prev + 1e-10);
            prev = result.objective;
        }
    }
}

TEST_CASE("fit: mini-batch mode trains and stays reproducible") {
    const Dataset data(1,
                       {Point{{0.0}}, Point{{0.25}}, Point{{0.5}}, Point{{0.75}}, Point{{1.0}},
                        Point{{-0.25}}, Point{{-0.5}}, Point{{-1.0}}},
                       {0.0, 0.25, 0.5, 0.75, 1.0, 0.0, 0.0, 0.0}, 1.0);
    FitConfig cfg;
    cfg.width = 6;
    cfg.mode = FitMode::Constrained;
    cfg.constraint = 2.0;
    cfg.seed = 19;
    cfg.opt.batch = 3;
    cfg.opt.step_size = 0.05;
    cfg.opt.max_epochs = 2000;
    const FitResult a = fit(data, cfg);
    CHECK(a.train_mse <= 1e-3); // relu(x) is feasible
    CHECK(path_norm(a.net) <= 2.0 * (1.0 + 1e-9));
    const FitResult b = fit(data, cfg);
    CHECK(a.objective == b.objective);
    // Full batch and mini-batch take different trajectories.
    cfg.opt.batch = 0;
    const FitResult full = fit(data, cfg);
    CHECK(full.train_mse <= 1e-3);
}

TEST_CASE("fit: identical seeds give identical results") {
    const Dataset data = three_point_data();
    FitConfig cfg;
    cfg.width = 5;
    cfg.mode = FitMode::PathRegularized;
    cfg.lambda = 0.01;
    cfg.seed = 123;
    const FitResult a = fit(data, cfg);
    const FitResult b = fit(data, cfg);
    CHECK(a.objective == b.objective);
    CHECK(a.train_mse == b.train_mse);
    for (std::size_t i = 0; i < a.net.width(); ++i) {
        CHECK(a.net.atoms()[i].outer == b.net.atoms()[i].outer);
        for (std::size_t k = 0; k < a.net.atoms()[i].inner.size(); ++k)
            CHECK(a.net.atoms()[i].inner[k] == b.net.atoms()[i].inner[k]);
    }
}

TEST_CASE("fit: diverging step size raises a numeric error naming the step") {
    FitConfig cfg;
    cfg.width = 8;
    cfg.mode = FitMode::L2Regularized;
    cfg.lambda = 0.1;
    cfg.opt.step_size = 1e6;
    cfg.seed = 2;
    try {
        (void)fit(three_point_data(), cfg);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("step size") != std::string::npos);
    }
}

TEST_CASE("fit: config validation") {
    const Dataset data = three_point_data();
    FitConfig cfg;
    cfg.width = 0;
    CHECK_THROWS_AS(fit(data, cfg), ConfigError);
    cfg.width = 2;
    cfg.mode = FitMode::PathRegularized;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(fit(data, cfg), ConfigError);
}

TEST_CASE("predict_truncated clamps to the level") {
    const Parameterization constant5(1, {Atom{5.0, {0.0, 1.0}}});
    CHECK(predict_truncated(constant5, Point{{0.3}}, TruncationLevel(1.0)) == 1.0);
    const Parameterization small(1, {Atom{0.25, {1.0, 0.0}}});
    CHECK(predict_truncated(small, Point{{0.8}}, TruncationLevel(1.0)) ==
          evaluate(small, Point{{0.8}}));
    const Parameterization negative(1, {Atom{-4.0, {0.0, 1.0}}});
    CHECK(predict_truncated(negative, Point{{0.0}}, TruncationLevel(2.0)) == -2.0);
}

TEST_CASE("regularizer equivalence report: identities hold on random nets") {
    RngStream rng(31, "test.equiv");
    const Dataset data = three_point_data();
    for (int t = 0; t < 100; ++t) {
        const Parameterization net = verify::random_network(rng, 1, 1 + t % 6);
        const auto rep = regularizer_equivalence_report(net, data, 0.1);
        CHECK(rep.all_ok);
        CHECK(rep.l2_objective_rescaled <= rep.l2_objective + 1e-10 * (1.0 + rep.l2_objective));
        CHECK(0.5 * rep.sq_norm >= rep.kappa - 1e-12 * (1.0 + rep.kappa));
    }
}

TEST_CASE("regularizer equivalence report: balanced nets make all four agree") {
    RngStream rng(32, "test.equiv2");
    const Dataset data = three_point_data();
    const Parameterization net = rescale_balanced(verify::random_network(rng, 1, 4));
    const auto rep = regularizer_equivalence_report(net, data, 0.2);
    CHECK(rep.all_ok);
    CHECK(std::abs(rep.path_objective - rep.l2_objective) <= 1e-10 * (1.0 + rep.path_objective));
    CHECK(std::abs(rep.path_objective - rep.path_objective_rescaled) <=
          1e-10 * (1.0 + rep.path_objective));
}

TEST_CASE("regularizer equivalence report: degenerate atom") {
    const Parameterization net(1, {Atom{0.0, {3.0, 1.0}}, Atom{1.0, {1.0, 0.0}}});
    const auto rep = regularizer_equivalence_report(net, three_point_data(), 0.1);
    CHECK(rep.all_ok);
}
