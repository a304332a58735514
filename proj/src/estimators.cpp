#include "srl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "srl/common.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

// Flat training state: lifted sample matrix plus raw weights, so the
// epoch loop touches contiguous memory only.
struct TrainBuffers {
    int n = 0;
    int d = 0;      // input dimension
    int din = 0;    // lifted dimension d + 1
    int width = 0;
    std::vector<double> lifted; // n x din, row-major, last column 1
    std::vector<double> y;
    std::vector<double> outer;  // width
    std::vector<double> inner;  // width x din
    std::vector<double> z;      // n x width pre-activations
    std::vector<double> resid;  // n
    std::vector<double> grad_outer;
    std::vector<double> grad_inner;
};

void init_buffers(TrainBuffers& b, const Dataset& data, int width) {
    b.n = static_cast<int>(data.size());
    b.d = data.dim_input();
    b.din = b.d + 1;
    b.width = width;
    b.lifted.resize(static_cast<std::size_t>(b.n) * b.din);
    b.y.resize(b.n);
    for (int j = 0; j < b.n; ++j) {
        const auto& c = data.points()[j].coords;
        double* row = &b.lifted[static_cast<std::size_t>(j) * b.din];
        for (int i = 0; i < b.d; ++i) row[i] = c[i];
        row[b.d] = 1.0;
        b.y[j] = data.labels()[j];
    }
    b.outer.assign(width, 0.0);
    b.inner.assign(static_cast<std::size_t>(width) * b.din, 0.0);
    b.z.resize(static_cast<std::size_t>(b.n) * width);
    b.resid.resize(b.n);
    b.grad_outer.resize(width);
    b.grad_inner.resize(static_cast<std::size_t>(width) * b.din);
}

// Symmetric start: inner weights uniform on the sphere, outer weights
// +-0.1/N with alternating signs so the initial function is near zero
// and the initial kappa stays small.
void random_init(TrainBuffers& b, RngStream& rng) {
    for (int i = 0; i < b.width; ++i) {
        const auto w = rng.on_sphere(b.din);
        std::copy(w.begin(), w.end(), b.inner.begin() + static_cast<std::size_t>(i) * b.din);
        b.outer[i] = ((i % 2 == 0) ? 1.0 : -1.0) * 0.1 / static_cast<double>(b.width);
    }
}

double inner_norm(const TrainBuffers& b, int i) {
    const double* w = &b.inner[static_cast<std::size_t>(i) * b.din];
    double s = 0.0;
    for (int k = 0; k < b.din; ++k) s += w[k] * w[k];
    return std::sqrt(s);
}

double kappa_of(const TrainBuffers& b) {
    double s = 0.0;
    for (int i = 0; i < b.width; ++i) s += std::abs(b.outer[i]) * inner_norm(b, i);
    return s;
}

double sq_norm_of(const TrainBuffers& b) {
    double s = 0.0;
    for (double a : b.outer) s += a * a;
    for (double w : b.inner) s += w * w;
    return s;
}

// Fills z and resid, returns the mean squared error.
double forward(TrainBuffers& b) {
    double mse = 0.0;
    for (int j = 0; j < b.n; ++j) {
        const double* row = &b.lifted[static_cast<std::size_t>(j) * b.din];
        double pred = 0.0;
        double* zrow = &b.z[static_cast<std::size_t>(j) * b.width];
        for (int i = 0; i < b.width; ++i) {
            const double* w = &b.inner[static_cast<std::size_t>(i) * b.din];
            double zi = 0.0;
            for (int k = 0; k < b.din; ++k) zi += w[k] * row[k];
            zrow[i] = zi;
            if (zi > 0.0) pred += b.outer[i] * zi;
        }
        const double r = pred - b.y[j];
        b.resid[j] = r;
        mse += r * r;
    }
    return mse / static_cast<double>(b.n);
}

// Mean-squared-error gradients; relu subgradient at the kink is 0.
void backward(TrainBuffers& b) {
    std::fill(b.grad_outer.begin(), b.grad_outer.end(), 0.0);
    std::fill(b.grad_inner.begin(), b.grad_inner.end(), 0.0);
    const double scale = 2.0 / static_cast<double>(b.n);
    for (int j = 0; j < b.n; ++j) {
        const double rj = scale * b.resid[j];
        if (rj == 0.0) continue;
        const double* row = &b.lifted[static_cast<std::size_t>(j) * b.din];
        const double* zrow = &b.z[static_cast<std::size_t>(j) * b.width];
        for (int i = 0; i < b.width; ++i) {
            const double zi = zrow[i];
            if (zi <= 0.0) continue;
            b.grad_outer[i] += rj * zi;
            const double ra = rj * b.outer[i];
            double* gw = &b.grad_inner[static_cast<std::size_t>(i) * b.din];
            for (int k = 0; k < b.din; ++k) gw[k] += ra * row[k];
        }
    }
}

// Mini-batch gradient on a row subset; recomputes activations because the
// weights move between chunks of the same epoch.
void backward_subset(TrainBuffers& b, std::span<const int> rows) {
    std::fill(b.grad_outer.begin(), b.grad_outer.end(), 0.0);
    std::fill(b.grad_inner.begin(), b.grad_inner.end(), 0.0);
    const double scale = 2.0 / static_cast<double>(rows.size());
    for (int j : rows) {
        const double* row = &b.lifted[static_cast<std::size_t>(j) * b.din];
        double pred = 0.0;
        double* zrow = &b.z[static_cast<std::size_t>(j) * b.width];
        for (int i = 0; i < b.width; ++i) {
            const double* w = &b.inner[static_cast<std::size_t>(i) * b.din];
            double zi = 0.0;
            for (int k = 0; k < b.din; ++k) zi += w[k] * row[k];
            zrow[i] = zi;
            if (zi > 0.0) pred += b.outer[i] * zi;
        }
        const double rj = scale * (pred - b.y[j]);
        if (rj == 0.0) continue;
        for (int i = 0; i < b.width; ++i) {
            const double zi = zrow[i];
            if (zi <= 0.0) continue;
            b.grad_outer[i] += rj * zi;
            const double ra = rj * b.outer[i];
            double* gw = &b.grad_inner[static_cast<std::size_t>(i) * b.din];
            for (int k = 0; k < b.din; ++k) gw[k] += ra * row[k];
        }
    }
}

void scale_outer(TrainBuffers& b, double s) {
    for (double& a : b.outer) a *= s;
}

// Proximal shrinkage for the path penalty lambda * sum |a_i| ||w_i||:
// soft-threshold on the outer weight, then block shrink on the inner
// norm with the updated outer magnitude. Drives dead atoms to exact
// zero, which a plain subgradient step cannot do with a constant step.
void prox_path_penalty(TrainBuffers& b, double step_lambda) {
    for (int i = 0; i < b.width; ++i) {
        const double wn = inner_norm(b, i);
        double& a = b.outer[i];
        const double thr = step_lambda * wn;
        if (a > thr) a -= thr;
        else if (a < -thr) a += thr;
        else a = 0.0;
        if (wn > 0.0) {
            const double shrink = std::max(0.0, 1.0 - step_lambda * std::abs(a) / wn);
            double* w = &b.inner[static_cast<std::size_t>(i) * b.din];
            for (int k = 0; k < b.din; ++k) w[k] *= shrink;
        }
    }
}

struct RunOutcome {
    double objective = std::numeric_limits<double>::infinity();
    double mse = 0.0;
    double penalty = 0.0;
    int epochs = 0;
    std::vector<double> outer;
    std::vector<double> inner;
};

RunOutcome run_descent(TrainBuffers& b, const FitConfig& cfg, RngStream& rng) {
    random_init(b, rng);
    if (cfg.mode == FitMode::Constrained) {
        const double k0 = kappa_of(b);
        if (k0 > cfg.constraint && k0 > 0.0) scale_outer(b, cfg.constraint / k0);
    }

    const double lr = cfg.opt.step_size;
    auto objective_of = [&](double mse) {
        switch (cfg.mode) {
            case FitMode::Constrained: return mse;
            case FitMode::PathRegularized: return mse + cfg.lambda * kappa_of(b);
            case FitMode::L2Regularized: return mse + 0.5 * cfg.lambda * sq_norm_of(b);
        }
        return mse;
    };

    double mse = forward(b);
    double objective = objective_of(mse);
    // Convergence window: stop when 50 epochs bring less than `tolerance`
    // of improvement.
    std::vector<double> window;
    window.reserve(cfg.opt.max_epochs + 1);
    window.push_back(objective);

    const int batch = cfg.opt.batch > 0 ? std::min(cfg.opt.batch, b.n) : b.n;
    std::vector<int> order(b.n);
    for (int j = 0; j < b.n; ++j) order[j] = j;

    const auto apply_update = [&]() {
        for (int i = 0; i < b.width; ++i) b.outer[i] -= lr * b.grad_outer[i];
        for (std::size_t k = 0; k < b.inner.size(); ++k) b.inner[k] -= lr * b.grad_inner[k];
        if (cfg.mode == FitMode::PathRegularized) {
            prox_path_penalty(b, lr * cfg.lambda);
        } else if (cfg.mode == FitMode::Constrained) {
            const double k = kappa_of(b);
            if (k > cfg.constraint && k > 0.0) scale_outer(b, cfg.constraint / k);
        }
    };
    const auto add_weight_decay = [&]() {
        if (cfg.mode != FitMode::L2Regularized) return;
        for (int i = 0; i < b.width; ++i) b.grad_outer[i] += cfg.lambda * b.outer[i];
        for (std::size_t k = 0; k < b.grad_inner.size(); ++k)
            b.grad_inner[k] += cfg.lambda * b.inner[k];
    };

    int epoch = 0;
    for (; epoch < cfg.opt.max_epochs; ++epoch) {
        if (batch >= b.n) {
            backward(b);
            add_weight_decay();
            apply_update();
        } else {
            // Fresh permutation per epoch, chunked into mini-batches.
            for (int j = b.n - 1; j > 0; --j)
                std::swap(order[j], order[rng.uniform_int(0, j)]);
            for (int start = 0; start < b.n; start += batch) {
                const int len = std::min(batch, b.n - start);
                backward_subset(b, std::span<const int>(order.data() + start,
                                                        static_cast<std::size_t>(len)));
                add_weight_decay();
                apply_update();
            }
        }

        mse = forward(b);
        objective = objective_of(mse);
        if (!std::isfinite(objective)) {
            throw NumericError("fit: objective diverged at step size " +
                               std::to_string(cfg.opt.step_size));
        }
        window.push_back(objective);
        if (epoch >= 50) {
            const double improvement = window[window.size() - 51] - objective;
            if (improvement < cfg.opt.tolerance) {
                ++epoch;
                break;
            }
        }
    }

    RunOutcome out;
    out.mse = mse;
    out.penalty = objective - mse;
    out.objective = objective;
    out.epochs = epoch;
    out.outer = b.outer;
    out.inner = b.inner;
    return out;
}

Parameterization to_net(const TrainBuffers& b, const RunOutcome& o, int d) {
    std::vector<Atom> atoms(b.width);
    for (int i = 0; i < b.width; ++i) {
        atoms[i].outer = o.outer[i];
        atoms[i].inner.assign(o.inner.begin() + static_cast<std::size_t>(i) * b.din,
                              o.inner.begin() + static_cast<std::size_t>(i + 1) * b.din);
    }
    return {d, std::move(atoms)};
}

} // namespace

double empirical_mse(const Parameterization& net, const Dataset& data) {
    if (data.size() == 0) throw ConfigError("empirical_mse: empty dataset");
    if (net.dim_input() != data.dim_input())
        throw ConfigError("empirical_mse: dimension mismatch between network and data");
    double s = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double r = evaluate(net, data.points()[j]) - data.labels()[j];
        s += r * r;
    }
    return s / static_cast<double>(data.size());
}

Parameterization project_kappa_ball(const Parameterization& net, double constraint) {
    if (!(constraint > 0.0)) throw ConfigError("project_kappa_ball: constraint must be > 0");
    const double k = path_norm(net);
    if (k <= constraint) return net;
    const double s = constraint / k;
    std::vector<Atom> atoms = net.atoms();
    for (Atom& a : atoms) a.outer *= s;
    return {net.dim_input(), std::move(atoms)};
}

FitResult fit(const Dataset& data, const FitConfig& cfg) {
    if (cfg.width < 1) throw ConfigError("fit: width must be >= 1");
    if (!(cfg.opt.step_size > 0.0)) throw ConfigError("fit: step size must be > 0");
    if (cfg.opt.restarts < 1) throw ConfigError("fit: restarts must be >= 1");
    if (cfg.mode == FitMode::Constrained && !(cfg.constraint > 0.0))
        throw ConfigError("fit: constrained mode needs M > 0");
    if (cfg.mode != FitMode::Constrained && !(cfg.lambda > 0.0))
        throw ConfigError("fit: regularized modes need lambda > 0");

    TrainBuffers buffers;
    init_buffers(buffers, data, cfg.width);

    RunOutcome best;
    int best_restart = 0;
    for (int r = 0; r < cfg.opt.restarts; ++r) {
        RngStream rng(cfg.seed, "fit.restart", static_cast<std::uint64_t>(r));
        RunOutcome out = run_descent(buffers, cfg, rng);
        if (out.objective < best.objective) {
            best = std::move(out);
            best_restart = r;
        }
    }

    FitResult result;
    result.net = to_net(buffers, best, data.dim_input());
    result.train_mse = best.mse;
    result.objective = best.objective;
    result.epochs_used = best.epochs;
    result.restart_index = best_restart;
    // Recompute the penalty from the final net so the stored objective is
    // consistent with (net, data) to high precision.
    switch (cfg.mode) {
        case FitMode::Constrained:
            result.penalty_value = 0.0;
            break;
        case FitMode::PathRegularized:
            result.penalty_value = cfg.lambda * path_norm(result.net);
            break;
        case FitMode::L2Regularized:
            result.penalty_value = 0.5 * cfg.lambda * param_sq_norm(result.net);
            break;
    }
    result.objective = result.train_mse + result.penalty_value;
    return result;
}

double predict_truncated(const Parameterization& net, const Point& x, TruncationLevel level) {
    return truncate(evaluate(net, x), level);
}

RegularizerEquivalenceReport regularizer_equivalence_report(const Parameterization& net,
                                                            const Dataset& data, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("regularizer_equivalence_report: lambda must be > 0");
    const Parameterization rescaled = rescale_balanced(net);

    RegularizerEquivalenceReport rep;
    rep.mse = empirical_mse(net, data);
    rep.mse_rescaled = empirical_mse(rescaled, data);
    rep.kappa = path_norm(net);
    rep.kappa_rescaled = path_norm(rescaled);
    rep.sq_norm = param_sq_norm(net);
    rep.sq_norm_rescaled = param_sq_norm(rescaled);
    rep.path_objective = rep.mse + lambda * rep.kappa;
    rep.path_objective_rescaled = rep.mse_rescaled + lambda * rep.kappa_rescaled;
    rep.l2_objective = rep.mse + 0.5 * lambda * rep.sq_norm;
    rep.l2_objective_rescaled = rep.mse_rescaled + 0.5 * lambda * rep.sq_norm_rescaled;

    const double scale = 1.0 + rep.kappa + std::abs(rep.mse);
    rep.kappa_invariant_ok = std::abs(rep.kappa - rep.kappa_rescaled) <= 1e-10 * scale;
    rep.half_sq_norm_identity_ok =
        std::abs(0.5 * rep.sq_norm_rescaled - rep.kappa) <= 1e-10 * scale;
    rep.norm_contraction_ok = rep.sq_norm_rescaled <= rep.sq_norm * (1.0 + 1e-12);
    rep.objective_order_ok =
        rep.l2_objective_rescaled <= rep.l2_objective + 1e-10 * scale &&
        std::abs(rep.path_objective - rep.l2_objective_rescaled) <=
            1e-9 * scale + std::abs(rep.mse - rep.mse_rescaled);
    rep.all_ok = rep.kappa_invariant_ok && rep.half_sq_norm_identity_ok &&
                 rep.norm_contraction_ok && rep.objective_order_ok;
    return rep;
}

} // namespace srl
