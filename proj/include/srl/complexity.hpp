#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "srl/net.hpp"

namespace srl {

// Metric entropy of the width-N kappa-ball in sup norm:
// N * (d+2) * log(1 + 4*sqrt(2)*M / eps). Explicit constants come from
// the sphere cover at scale eps/(2*sqrt(2)M) and the l1 cover of the
// outer weights at eps/(2*sqrt(2)).
double entropy_bound(double eps, int width, double norm_budget, int dim);

struct VariationEntropy {
    double value = 0.0;
    bool capped_at_diameter = false; // eps exceeded the class diameter M
};

// Width-free entropy of the variation ball: an eps/2-cover of
// NN(N(eps), M) with N(eps) = ceil((eps/2M)^(-2d/(d+3))) covers the
// whole class at scale eps.
VariationEntropy variation_entropy_bound(double eps, double norm_budget, int dim);

// inf over eps in [0, delta] of 4 eps + (16/sqrt(n)) * integral from eps
// to delta of sqrt(variation entropy). Composite Simpson (relative
// tolerance 1e-6, integrable endpoint singularity removed by the
// u = t^{3/(d+3)} substitution) under a golden-section search in eps.
double dudley_bound(double delta, double norm_budget, int dim, std::int64_t n);

// C * varsigma * delta^{3/(d+3)} M^{d/(d+3)} sqrt(log(nM/delta)) / sqrt(n).
// At delta = M this is the M sqrt(log n)/sqrt(n) global-complexity shape.
double local_bound_shape(double delta, double norm_budget, std::int64_t n, int dim,
                         double varsigma, double constant = 1.0);

enum class NoiseKind { Rademacher, BoundedSym, Gaussian };

struct InnerOptConfig {
    int steps = 200;
    double step_size = 0.25;
    int restarts = 8;
};

struct ComplexityConfig {
    int n = 0;              // sample count (must match the point list)
    double norm_budget = 1; // M
    int dim = 1;            // d
    double delta = 0.25;    // localization radius, 0 < delta <= M
    NoiseKind noise = NoiseKind::Rademacher;
    double noise_scale = 1.0; // B for BoundedSym, varsigma for Gaussian
    int mc_replicates = 100;
    InnerOptConfig inner;
    std::uint64_t seed = 0;
    int width = 8; // N of the network class
    int threads = 1;
};

struct FunctionClassSpec {
    enum class Kind { NormBall, StarTruncated } kind = Kind::NormBall;
    double trunc_level = 1.0; // B for StarTruncated
};

struct ComplexityEstimate {
    double mc_value = 0.0;   // lower estimate: the inner maximization is approximate
    double std_error = 0.0;  // replicate scatter only, not the optimization gap
    double analytic_bound = 0.0; // local_bound_shape at C = 1
    double dudley_bound = 0.0;
};

// Monte-Carlo estimate of E_xi sup_{f in class, ||f||_{L2(mu_n)} <= delta}
// |(1/n) sum xi_i f(X_i)|. The inner sup runs projected gradient ascent
// over the weights; the empirical-norm ball is enforced by function
// rescaling, legitimate because both classes are star-shaped.
ComplexityEstimate mc_local_complexity(std::span<const Point> points,
                                       const ComplexityConfig& cfg,
                                       const FunctionClassSpec& cls);

// Smallest delta in [lo, hi] with bound(delta) <= c * delta^2, by
// bisection to relative tolerance 1e-9. Valid whenever bound(delta)/delta
// is non-increasing, which all shapes above satisfy.
double fixed_point_radius(const std::function<double(double)>& bound, double c, double lo,
                          double hi);

} // namespace srl
