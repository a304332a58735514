#pragma once

#include <cstdint>
#include <string>

#include "srl/dataset.hpp"
#include "srl/net.hpp"

namespace srl {

enum class FitMode { Constrained, PathRegularized, L2Regularized };

struct OptimizerConfig {
    double step_size = 0.05;
    int max_epochs = 3000;
    int batch = 0; // 0 = full batch; acceptance paths always use full batch
    double tolerance = 1e-10;
    int restarts = 2;
};

struct FitConfig {
    int width = 8;                      // N
    FitMode mode = FitMode::Constrained;
    double constraint = 1.0;            // M, constrained mode
    double lambda = 0.0;                // regularized modes
    OptimizerConfig opt;
    std::uint64_t seed = 0;
};

struct FitResult {
    Parameterization net = Parameterization::zero(1);
    double train_mse = 0.0;
    double penalty_value = 0.0;
    double objective = 0.0;
    int epochs_used = 0;
    int restart_index = 0;
};

// (1/n) sum (f(X_i) - Y_i)^2.
double empirical_mse(const Parameterization& net, const Dataset& data);

// Feasibility map for the kappa ball: identity inside, otherwise all
// outer weights scale by M / kappa so the output has kappa == M exactly.
Parameterization project_kappa_ball(const Parameterization& net, double constraint);

// Full-batch first-order training from symmetric random initialization,
// best restart wins (ties break toward the lower restart index). The
// returned net is an approximate minimizer; global optimality is not
// claimed. Throws NumericError when the objective turns non-finite.
FitResult fit(const Dataset& data, const FitConfig& cfg);

double predict_truncated(const Parameterization& net, const Point& x, TruncationLevel level);

// Audit record for the path-norm / weight-decay equivalence: the four
// objectives at theta and r(theta) plus the identities tying them.
struct RegularizerEquivalenceReport {
    double mse = 0.0;
    double mse_rescaled = 0.0;
    double kappa = 0.0;
    double kappa_rescaled = 0.0;
    double sq_norm = 0.0;
    double sq_norm_rescaled = 0.0;
    double path_objective = 0.0;          // L(theta)      + lambda * kappa(theta)
    double path_objective_rescaled = 0.0; // L(r(theta))   + lambda * kappa(r(theta))
    double l2_objective = 0.0;            // L(theta)      + lambda/2 * ||theta||^2
    double l2_objective_rescaled = 0.0;   // L(r(theta))   + lambda/2 * ||r(theta)||^2
    bool kappa_invariant_ok = false;      // kappa(r) == kappa
    bool half_sq_norm_identity_ok = false; // ||r||^2 / 2 == kappa
    bool norm_contraction_ok = false;     // ||r||^2 <= ||theta||^2
    bool objective_order_ok = false;      // l2(r) <= l2(theta), path == l2(r)
    bool all_ok = false;
};

RegularizerEquivalenceReport regularizer_equivalence_report(const Parameterization& net,
                                                            const Dataset& data, double lambda);

} // namespace srl
