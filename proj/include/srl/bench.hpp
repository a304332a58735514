#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srl/dataset.hpp"
#include "srl/estimators.hpp"
#include "srl/net.hpp"

namespace srl {

struct TargetSpec {
    enum class Kind { Hat, RadialPower, VariationTeacher } kind = Kind::Hat;
    int dim = 1;
    double alpha = 1.0;       // smoothness for the Holder builders
    int teacher_width = 8;    // VariationTeacher
    std::uint64_t teacher_seed = 0;
};

struct TargetMetadata {
    std::string kind;
    double alpha = 0.0;
    double smoothness_constant = 0.0; // certified Lipschitz/Holder constant or kappa
    double sup_bound = 0.0;           // certified bound on sup |h|
};

struct Target {
    std::function<double(std::span<const double>)> eval;
    TargetMetadata meta;
    int dim = 1;
    std::optional<Parameterization> teacher;
};

// Deterministic synthetic regression targets:
//   hat:           1 - ||x|| (Lipschitz constant 1, alpha = 1);
//   radial-power:  ||x||^alpha, alpha in (0,1] (Holder constant 1);
//   teacher:       random width-k network, outer weights normalized so
//                  kappa equals 1 exactly.
Target make_target(const TargetSpec& spec);

// X uniform on B^d, eta uniform on [-sigma, sigma], Y = h(X) + eta.
// Requires sup|h| + sigma <= label_bound so |Y| <= B holds surely.
Dataset sample_dataset(const Target& target, int n, double noise_halfwidth, double label_bound,
                       std::uint64_t seed);

enum class Regime { Holder, Variation };

struct ScheduleConstants {
    double c_M = 1.0;
    double c_N = 1.0;
    double c_lambda = 1.0;
};

struct Schedule {
    Regime regime = Regime::Holder;
    int n = 0;
    int dim = 1;
    double alpha = 1.0;
    double M_n = 0.0;
    int N_n = 0;
    double lambda_n = 0.0;
    ScheduleConstants constants;
};

// Exponents of the sample-size schedules, exposed so tests can pin them to
// hand-reduced rationals.
double holder_m_exponent(int dim, double alpha);        // (d+3-2a)/(2d+4a)
double holder_width_exponent(int dim, double alpha);    // d/(d+2a)
double holder_lambda_exponent(int dim, double alpha);   // -(d+3+2a)/(2d+4a)
double holder_rate_exponent(int dim, double alpha);     // 2a/(d+2a)
double variation_width_exponent(int dim);               // d/(2d+3)
double variation_rate_exponent(int dim);                // (d+3)/(2d+3)

// Holder: M_n = c_M n^{(d+3-2a)/(2d+4a)}, N_n = ceil(c_N n^{d/(d+2a)}),
// lambda_n = c_l n^{-(d+3+2a)/(2d+4a)} log n. Variation: M_n = c_M,
// N_n = ceil(c_N n^{d/(2d+3)}), lambda_n = c_l n^{-(d+3)/(2d+3)} log n.
Schedule make_schedule(Regime regime, int n, int dim, double alpha,
                       const ScheduleConstants& constants = {});

// Monte-Carlo estimate of E_X (T_b fhat(X) - h(X))^2, X uniform on B^d.
struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
RiskEstimate excess_risk(const Parameterization& net, const Target& target, TruncationLevel level,
                         int eval_samples, std::uint64_t seed);

// Ordinary least squares slope of log(risk) on log(n); std error from
// the regression residuals.
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& risks);

struct RateTrialRow {
    int n = 0;
    int trial = 0;
    double excess_risk = 0.0;
    double train_mse = 0.0;
    double kappa_reached = 0.0;
    std::uint64_t seed = 0;
    bool diverged = false;
};

struct RateRow {
    int n = 0;
    double excess_risk_mean = 0.0;
    double excess_risk_stderr = 0.0;
    double train_mse = 0.0;
    double kappa_reached = 0.0;
    bool usable = true; // false when every trial diverged
};

struct RateExperimentConfig {
    Regime regime = Regime::Variation;
    TargetSpec target;
    std::vector<int> n_grid = {64, 128, 256, 512, 1024, 2048, 4096};
    int trials_per_n = 5;
    FitMode mode = FitMode::PathRegularized;
    double noise_halfwidth = 0.4;
    double label_bound = 0.0; // 0 = derive as sup|h| + noise
    ScheduleConstants constants;
    OptimizerConfig opt;
    int eval_samples = 20000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct RateReport {
    std::vector<RateTrialRow> trials;
    std::vector<RateRow> rows;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double theory_slope = 0.0;
    RateExperimentConfig config; // full provenance
    TargetMetadata target_meta;
};

// For each n: schedule, sample, fit, measure; then the log-log slope
// over per-n means. Diverged fits are flagged and excluded from the fit.
RateReport run_rate_experiment(const RateExperimentConfig& cfg);

std::string rate_report_csv(const RateReport& report);
std::string rate_report_json(const RateReport& report);
std::string rate_report_svg(const RateReport& report);

} // namespace srl
