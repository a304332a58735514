#include "srl/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "srl/common.hpp"
#include "srl/parallel.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

constexpr double kFourSqrtTwo = 5.6568542494923801952;

// Simpson on [a, b] with 2*m panels.
template <typename F>
double simpson(const F& f, double a, double b, int half_panels) {
    const int n = 2 * half_panels;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; i += 2) s += 4.0 * f(a + i * h);
    for (int i = 2; i < n; i += 2) s += 2.0 * f(a + i * h);
    return s * h / 3.0;
}

// Adaptive-by-doubling Simpson with relative tolerance 1e-6.
template <typename F>
double integrate(const F& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double prev = simpson(f, a, b, 4);
    for (int half_panels = 8; half_panels <= (1 << 20); half_panels *= 2) {
        const double cur = simpson(f, a, b, half_panels);
        if (std::abs(cur - prev) <= 1e-6 * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    std::ostringstream oss;
    oss << "dudley_bound: Simpson quadrature did not converge on [" << a << ", " << b
        << "], last value " << prev;
    throw NumericError(oss.str());
}

} // namespace

double entropy_bound(double eps, int width, double norm_budget, int dim) {
    if (!(eps > 0.0)) throw ConfigError("entropy_bound: eps must be > 0");
    if (width < 0) throw ConfigError("entropy_bound: width must be >= 0");
    if (width == 0) return 0.0;
    return static_cast<double>(width) * (dim + 2) *
           std::log1p(kFourSqrtTwo * norm_budget / eps);
}

VariationEntropy variation_entropy_bound(double eps, double norm_budget, int dim) {
    if (!(eps > 0.0)) throw ConfigError("variation_entropy_bound: eps must be > 0");
    if (!(norm_budget > 0.0)) throw ConfigError("variation_entropy_bound: M must be > 0");
    VariationEntropy out;
    if (eps > norm_budget) {
        out.capped_at_diameter = true;
        eps = norm_budget;
    }
    const double expo = 2.0 * dim / (dim + 3.0);
    const double ratio = eps / (2.0 * norm_budget);
    const int width = static_cast<int>(std::ceil(std::pow(ratio, -expo)));
    out.value = entropy_bound(0.5 * eps, width, norm_budget, dim);
    return out;
}

double dudley_bound(double delta, double norm_budget, int dim, std::int64_t n) {
    if (!(delta > 0.0) || delta > norm_budget)
        throw ConfigError("dudley_bound: need 0 < delta <= M");
    if (n < 1) throw ConfigError("dudley_bound: n must be >= 1");

    const double sub_expo = 3.0 / (dim + 3.0);     // u = t^{3/(d+3)}
    const double inv_sub_expo = (dim + 3.0) / 3.0; // t = u^{(d+3)/3}, dt/du = ((d+3)/3) u^{d/3}
    const auto integrand = [&](double u) {
        const double t = std::pow(u, inv_sub_expo);
        if (!(t > 0.0)) return 0.0;
        const double g = std::sqrt(variation_entropy_bound(t, norm_budget, dim).value);
        return g * inv_sub_expo * std::pow(u, inv_sub_expo - 1.0);
    };

    const double scale = 16.0 / std::sqrt(static_cast<double>(n));
    const double u_hi = std::pow(delta, sub_expo);
    const auto objective = [&](double eps) {
        const double u_lo = std::pow(eps, sub_expo);
        return 4.0 * eps + scale * integrate(integrand, u_lo, u_hi);
    };

    // Golden-section search on the convex objective; the lower endpoint
    // carries an epsilon floor because the entropy blows up at 0.
    const double golden = 0.61803398874989484820;
    double lo = delta * 1e-9;
    double hi = delta;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 80 && (hi - lo) > 1e-7 * delta; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = objective(x2);
        }
    }
    return std::min({f1, f2, objective(lo), objective(hi)});
}

double local_bound_shape(double delta, double norm_budget, std::int64_t n, int dim,
                         double varsigma, double constant) {
    if (!(delta > 0.0) || delta > norm_budget)
        throw ConfigError("local_bound_shape: need 0 < delta <= M");
    if (n < 2) throw ConfigError("local_bound_shape: n must be >= 2");
    if (!(static_cast<double>(n) * norm_budget / delta > 1.0))
        throw ConfigError("local_bound_shape: need nM/delta > 1");
    if (varsigma < 0.0) throw ConfigError("local_bound_shape: varsigma must be >= 0");
    const double dd = static_cast<double>(dim);
    return constant * varsigma * std::pow(delta, 3.0 / (dd + 3.0)) *
           std::pow(norm_budget, dd / (dd + 3.0)) *
           std::sqrt(std::log(static_cast<double>(n) * norm_budget / delta)) /
           std::sqrt(static_cast<double>(n));
}

namespace {

// Inner maximization workspace shared across restarts of one replicate.
struct AscentState {
    int n = 0;
    int din = 0;
    int width = 0;
    std::vector<double> lifted; // n x din
    std::vector<double> xi;     // n
    std::vector<double> outer;
    std::vector<double> inner;
    std::vector<double> z; // n x width
    std::vector<double> f; // n, current function values (pre-truncation)
};

double inner_norm(const AscentState& s, int i) {
    const double* w = &s.inner[static_cast<std::size_t>(i) * s.din];
    double acc = 0.0;
    for (int k = 0; k < s.din; ++k) acc += w[k] * w[k];
    return std::sqrt(acc);
}

double kappa_of(const AscentState& s) {
    double acc = 0.0;
    for (int i = 0; i < s.width; ++i) acc += std::abs(s.outer[i]) * inner_norm(s, i);
    return acc;
}

void forward_values(AscentState& s) {
    for (int j = 0; j < s.n; ++j) {
        const double* row = &s.lifted[static_cast<std::size_t>(j) * s.din];
        double* zrow = &s.z[static_cast<std::size_t>(j) * s.width];
        double pred = 0.0;
        for (int i = 0; i < s.width; ++i) {
            const double* w = &s.inner[static_cast<std::size_t>(i) * s.din];
            double zi = 0.0;
            for (int k = 0; k < s.din; ++k) zi += w[k] * row[k];
            zrow[i] = zi;
            if (zi > 0.0) pred += s.outer[i] * zi;
        }
        s.f[j] = pred;
    }
}

// One projected-ascent run; returns |correlation| of a certified-feasible
// class element. `trunc` < 0 means the plain norm-ball class.
//
// Norm ball: scaling the outer weights scales the function linearly, so
// the empirical-norm constraint is enforced (and saturated) by outer
// rescaling. Truncated class: scaling does not commute with the clamp,
// so feasibility comes from the explicit star coefficient in [0, 1]
// applied to the truncated function at evaluation time.
double ascend(AscentState& s, const ComplexityConfig& cfg, double trunc, RngStream& rng) {
    for (int i = 0; i < s.width; ++i) {
        const auto w = rng.on_sphere(s.din);
        std::copy(w.begin(), w.end(), s.inner.begin() + static_cast<std::size_t>(i) * s.din);
        s.outer[i] = ((i % 2 == 0) ? 1.0 : -1.0) * 0.1 / static_cast<double>(s.width);
    }

    const double inv_n = 1.0 / static_cast<double>(s.n);
    std::vector<double> grad_outer(s.width);
    std::vector<double> grad_inner(static_cast<std::size_t>(s.width) * s.din);

    auto project = [&]() {
        const double kap = kappa_of(s);
        double scale = kap > 0.0 ? cfg.norm_budget / kap : 1.0;
        if (trunc <= 0.0) {
            double fn = 0.0;
            for (int j = 0; j < s.n; ++j) fn += s.f[j] * s.f[j];
            fn = std::sqrt(fn * inv_n);
            if (fn > 0.0) scale = std::min(scale, cfg.delta / fn);
        } else if (scale > 1.0) {
            scale = 1.0; // only the kappa ball constrains the raw weights
        }
        if (scale != 1.0 && std::isfinite(scale))
            for (double& a : s.outer) a *= scale;
    };
    auto feasible_value = [&]() {
        double corr = 0.0;
        if (trunc <= 0.0) {
            for (int j = 0; j < s.n; ++j) corr += s.xi[j] * s.f[j];
            return std::abs(corr * inv_n);
        }
        double fn = 0.0;
        for (int j = 0; j < s.n; ++j) {
            const double v = std::clamp(s.f[j], -trunc, trunc);
            corr += s.xi[j] * v;
            fn += v * v;
        }
        fn = std::sqrt(fn * inv_n);
        const double star = fn > cfg.delta ? cfg.delta / fn : 1.0;
        return std::abs(star * corr * inv_n);
    };

    forward_values(s);
    project();

    for (int step = 0; step < cfg.inner.steps; ++step) {
        forward_values(s);
        std::fill(grad_outer.begin(), grad_outer.end(), 0.0);
        std::fill(grad_inner.begin(), grad_inner.end(), 0.0);
        for (int j = 0; j < s.n; ++j) {
            if (trunc > 0.0 && std::abs(s.f[j]) >= trunc) continue; // flat region
            const double gj = s.xi[j] * inv_n;
            const double* row = &s.lifted[static_cast<std::size_t>(j) * s.din];
            const double* zrow = &s.z[static_cast<std::size_t>(j) * s.width];
            for (int i = 0; i < s.width; ++i) {
                const double zi = zrow[i];
                if (zi <= 0.0) continue;
                grad_outer[i] += gj * zi;
                const double ga = gj * s.outer[i];
                double* gw = &grad_inner[static_cast<std::size_t>(i) * s.din];
                for (int k = 0; k < s.din; ++k) gw[k] += ga * row[k];
            }
        }
        const double lr = cfg.inner.step_size;
        for (int i = 0; i < s.width; ++i) s.outer[i] += lr * grad_outer[i];
        for (std::size_t k = 0; k < s.inner.size(); ++k) s.inner[k] += lr * grad_inner[k];
        forward_values(s);
        project();
    }

    forward_values(s);
    project();
    forward_values(s);
    return feasible_value();
}

} // namespace

ComplexityEstimate mc_local_complexity(std::span<const Point> points,
                                       const ComplexityConfig& cfg,
                                       const FunctionClassSpec& cls) {
    const int n = static_cast<int>(points.size());
    if (n < 1) throw ConfigError("mc_local_complexity: needs at least one point");
    if (cfg.n > 0 && cfg.n != n)
        throw ConfigError("mc_local_complexity: cfg.n does not match the point count");
    if (cfg.mc_replicates < 1) throw ConfigError("mc_local_complexity: replicates must be >= 1");
    if (!(cfg.delta > 0.0)) throw ConfigError("mc_local_complexity: delta must be > 0");
    if (cfg.norm_budget < 0.0) throw ConfigError("mc_local_complexity: M must be >= 0");
    if (cfg.norm_budget > 0.0 && cfg.delta > cfg.norm_budget)
        throw ConfigError("mc_local_complexity: need delta <= M");
    const int dim = cfg.dim;
    for (const Point& p : points) {
        if (p.coords.size() != static_cast<std::size_t>(dim))
            throw ConfigError("mc_local_complexity: point dimension mismatch");
        if (euclidean_norm(p.coords) > 1.0 + 1e-12)
            throw ConfigError("mc_local_complexity: point outside the unit ball");
    }

    ComplexityEstimate est;
    if (cfg.norm_budget == 0.0) return est; // only the zero function: everything is 0

    // Companion bounds, left at 0 outside their domain (tiny n).
    const double varsigma = cfg.noise == NoiseKind::Rademacher ? 1.0 : cfg.noise_scale;
    if (n >= 2 && static_cast<double>(n) * cfg.norm_budget / cfg.delta > 1.0)
        est.analytic_bound = local_bound_shape(cfg.delta, cfg.norm_budget, n, dim, varsigma);
    est.dudley_bound = dudley_bound(cfg.delta, cfg.norm_budget, dim, n);

    std::vector<double> values(cfg.mc_replicates, 0.0);
    const double trunc = cls.kind == FunctionClassSpec::Kind::StarTruncated ? cls.trunc_level : -1.0;

    parallel_for(cfg.mc_replicates, cfg.threads, [&](int rep) {
        AscentState s;
        s.n = n;
        s.din = dim + 1;
        s.width = cfg.width;
        s.lifted.resize(static_cast<std::size_t>(n) * s.din);
        for (int j = 0; j < n; ++j) {
            double* row = &s.lifted[static_cast<std::size_t>(j) * s.din];
            for (int k = 0; k < dim; ++k) row[k] = points[j].coords[k];
            row[dim] = 1.0;
        }
        s.xi.resize(n);
        s.outer.resize(cfg.width);
        s.inner.resize(static_cast<std::size_t>(cfg.width) * s.din);
        s.z.resize(static_cast<std::size_t>(n) * cfg.width);
        s.f.resize(n);

        RngStream noise_rng(cfg.seed, "complexity.noise", static_cast<std::uint64_t>(rep));
        for (int j = 0; j < n; ++j) {
            switch (cfg.noise) {
                case NoiseKind::Rademacher: s.xi[j] = noise_rng.rademacher(); break;
                case NoiseKind::BoundedSym:
                    s.xi[j] = cfg.noise_scale * noise_rng.rademacher();
                    break;
                case NoiseKind::Gaussian: s.xi[j] = cfg.noise_scale * noise_rng.normal(); break;
            }
        }

        double best = 0.0;
        for (int r = 0; r < cfg.inner.restarts; ++r) {
            RngStream init_rng(cfg.seed, "complexity.inner",
                               static_cast<std::uint64_t>(rep) * cfg.inner.restarts + r);
            best = std::max(best, ascend(s, cfg, trunc, init_rng));
            if (!std::isfinite(best))
                throw NumericError("mc_local_complexity: inner maximization diverged");
        }
        values[static_cast<std::size_t>(rep)] = best;
    });

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    est.mc_value = mean;
    est.std_error = values.size() > 1
                        ? std::sqrt(var / (static_cast<double>(values.size()) *
                                           (static_cast<double>(values.size()) - 1.0)))
                        : 0.0;
    return est;
}

double fixed_point_radius(const std::function<double(double)>& bound, double c, double lo,
                          double hi) {
    if (!(c > 0.0)) throw ConfigError("fixed_point_radius: c must be > 0");
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("fixed_point_radius: need 0 < lo < hi");
    const auto gap = [&](double delta) { return bound(delta) - c * delta * delta; };
    const double g_lo = gap(lo);
    const double g_hi = gap(hi);
    if (!(g_lo > 0.0) || g_hi > 0.0) {
        std::ostringstream oss;
        oss << "fixed_point_radius: no crossing in [" << lo << ", " << hi << "]; gap(lo)=" << g_lo
            << " gap(hi)=" << g_hi;
        throw NumericError(oss.str());
    }
    double a = lo, b = hi;
    while ((b - a) > 1e-11 * b) {
        const double mid = 0.5 * (a + b);
        if (gap(mid) <= 0.0) b = mid;
        else a = mid;
    }
    return b;
}

} // namespace srl
