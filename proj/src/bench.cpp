#include "srl/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "srl/common.hpp"
#include "srl/parallel.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return {buf, ptr};
}

// ceil with a relative slack so power-law widths that are mathematically
// integral (e.g. 1024^{1/5} = 4) do not round up on floating-point noise.
int ceil_snapped(double v) {
    return static_cast<int>(std::ceil(v - 1e-12 * std::max(1.0, std::abs(v))));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / (static_cast<double>(v.size()) * (static_cast<double>(v.size()) - 1.0)));
}

} // namespace

Target make_target(const TargetSpec& spec) {
    if (spec.dim < 1) throw ConfigError("make_target: dim must be >= 1");
    Target t;
    t.dim = spec.dim;
    switch (spec.kind) {
        case TargetSpec::Kind::Hat: {
            t.meta = {"hat", 1.0, 1.0, 1.0};
            t.eval = [](std::span<const double> x) {
                return std::max(0.0, 1.0 - euclidean_norm(x));
            };
            return t;
        }
        case TargetSpec::Kind::RadialPower: {
            if (!(spec.alpha > 0.0) || spec.alpha > 1.0)
                throw ConfigError("make_target: radial-power needs alpha in (0, 1]");
            const double a = spec.alpha;
            t.meta = {"radial-power", a, 1.0, 1.0};
            t.eval = [a](std::span<const double> x) { return std::pow(euclidean_norm(x), a); };
            return t;
        }
        case TargetSpec::Kind::VariationTeacher: {
            if (spec.teacher_width < 1)
                throw ConfigError("make_target: teacher width must be >= 1");
            RngStream rng(spec.teacher_seed, "target.teacher");
            std::vector<Atom> atoms(spec.teacher_width);
            double kappa = 0.0;
            for (int i = 0; i < spec.teacher_width; ++i) {
                atoms[i].inner = rng.on_sphere(spec.dim + 1);
                atoms[i].outer = ((i % 2 == 0) ? 1.0 : -1.0) * rng.uniform(0.5, 1.5);
                kappa += std::abs(atoms[i].outer);
            }
            for (Atom& a : atoms) a.outer /= kappa; // kappa(theta) becomes 1
            Parameterization teacher(spec.dim, std::move(atoms));
            t.meta = {"variation-teacher", 0.0, path_norm(teacher),
                      std::sqrt(2.0) * path_norm(teacher)};
            t.teacher = teacher;
            t.eval = [net = std::move(teacher)](std::span<const double> x) {
                return evaluate(net, x);
            };
            return t;
        }
    }
    throw ConfigError("make_target: unknown target kind");
}

Dataset sample_dataset(const Target& target, int n, double noise_halfwidth, double label_bound,
                       std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_dataset: n must be >= 1");
    if (noise_halfwidth < 0.0) throw ConfigError("sample_dataset: noise halfwidth must be >= 0");
    if (target.meta.sup_bound + noise_halfwidth > label_bound * (1.0 + 1e-12))
        throw ConfigError("sample_dataset: need sup|h| + sigma <= label bound");
    RngStream rng(seed, "dataset.sample");
    std::vector<Point> xs;
    std::vector<double> ys;
    xs.reserve(n);
    ys.reserve(n);
    const int dim = target.dim;
    for (int i = 0; i < n; ++i) {
        Point p;
        p.coords = rng.in_ball(dim);
        const double h = target.eval(p.coords);
        const double eta = noise_halfwidth > 0.0
                               ? rng.uniform(-noise_halfwidth, noise_halfwidth)
                               : 0.0;
        xs.push_back(std::move(p));
        ys.push_back(h + eta);
    }
    return {dim, std::move(xs), std::move(ys), label_bound};
}

double holder_m_exponent(int dim, double alpha) {
    return (dim + 3.0 - 2.0 * alpha) / (2.0 * dim + 4.0 * alpha);
}
double holder_width_exponent(int dim, double alpha) { return dim / (dim + 2.0 * alpha); }
double holder_lambda_exponent(int dim, double alpha) {
    return -(dim + 3.0 + 2.0 * alpha) / (2.0 * dim + 4.0 * alpha);
}
double holder_rate_exponent(int dim, double alpha) { return 2.0 * alpha / (dim + 2.0 * alpha); }
double variation_width_exponent(int dim) { return dim / (2.0 * dim + 3.0); }
double variation_rate_exponent(int dim) { return (dim + 3.0) / (2.0 * dim + 3.0); }

Schedule make_schedule(Regime regime, int n, int dim, double alpha,
                       const ScheduleConstants& constants) {
    if (n < 2) throw ConfigError("make_schedule: n must be >= 2");
    if (dim < 1) throw ConfigError("make_schedule: dim must be >= 1");
    Schedule s;
    s.regime = regime;
    s.n = n;
    s.dim = dim;
    s.alpha = alpha;
    s.constants = constants;
    const double nn = static_cast<double>(n);
    if (regime == Regime::Holder) {
        if (!(alpha > 0.0) || !(alpha < (dim + 3.0) / 2.0))
            throw ConfigError("make_schedule: Holder regime needs 0 < alpha < (d+3)/2");
        s.M_n = constants.c_M * std::pow(nn, holder_m_exponent(dim, alpha));
        s.N_n = ceil_snapped(constants.c_N * std::pow(nn, holder_width_exponent(dim, alpha)));
        s.lambda_n = constants.c_lambda * std::pow(nn, holder_lambda_exponent(dim, alpha)) *
                     std::log(nn);
    } else {
        if (!(constants.c_M >= 1.0))
            throw ConfigError("make_schedule: variation regime needs constant M >= 1");
        s.M_n = constants.c_M;
        s.N_n = ceil_snapped(constants.c_N * std::pow(nn, variation_width_exponent(dim)));
        s.lambda_n = constants.c_lambda * std::pow(nn, -variation_rate_exponent(dim)) *
                     std::log(nn);
    }
    return s;
}

RiskEstimate excess_risk(const Parameterization& net, const Target& target,
                         TruncationLevel level, int eval_samples, std::uint64_t seed) {
    if (eval_samples < 100) throw ConfigError("excess_risk: needs at least 100 samples");
    RngStream rng(seed, "risk.eval");
    double sum = 0.0;
    double sum_sq = 0.0;
    const int d = net.dim_input();
    for (int i = 0; i < eval_samples; ++i) {
        const auto x = rng.in_ball(d);
        const double pred = truncate(evaluate(net, x), level);
        const double diff = pred - target.eval(x);
        const double se = diff * diff;
        sum += se;
        sum_sq += se * se;
    }
    const double m = static_cast<double>(eval_samples);
    RiskEstimate est;
    est.mean = sum / m;
    const double var = std::max(0.0, sum_sq / m - est.mean * est.mean);
    est.std_error = std::sqrt(var / m);
    return est;
}

SlopeFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& risks) {
    if (ns.size() != risks.size() || ns.size() < 3)
        throw ConfigError("fit_loglog_slope: needs at least 3 matched rows");
    const std::size_t k = ns.size();
    std::vector<double> x(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(ns[i] > 0.0) || !(risks[i] > 0.0))
            throw ConfigError("fit_loglog_slope: values must be positive");
        x[i] = std::log(ns[i]);
        y[i] = std::log(risks[i]);
    }
    const double xbar = mean_of(x);
    const double ybar = mean_of(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    SlopeFit fitted;
    fitted.slope = sxy / sxx;
    fitted.intercept = ybar - fitted.slope * xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = y[i] - (fitted.intercept + fitted.slope * x[i]);
        rss += r * r;
    }
    fitted.std_error = k > 2 ? std::sqrt(rss / (static_cast<double>(k) - 2.0) / sxx) : 0.0;
    return fitted;
}

RateReport run_rate_experiment(const RateExperimentConfig& cfg) {
    if (cfg.n_grid.size() < 4) throw ConfigError("run_rate_experiment: n grid needs >= 4 sizes");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw ConfigError("run_rate_experiment: n grid must be strictly increasing");
    if (cfg.trials_per_n < 3) throw ConfigError("run_rate_experiment: trials_per_n must be >= 3");

    const Target target = make_target(cfg.target);
    const double label_bound = cfg.label_bound > 0.0
                                   ? cfg.label_bound
                                   : target.meta.sup_bound + cfg.noise_halfwidth;

    RateReport report;
    report.config = cfg;
    report.config.label_bound = label_bound;
    report.target_meta = target.meta;
    report.theory_slope = cfg.regime == Regime::Holder
                              ? -holder_rate_exponent(cfg.target.dim, cfg.target.alpha)
                              : -variation_rate_exponent(cfg.target.dim);

    const int cells = static_cast<int>(cfg.n_grid.size()) * cfg.trials_per_n;
    report.trials.assign(cells, {});
    parallel_for(cells, cfg.threads, [&](int cell) {
        const int ni = cell / cfg.trials_per_n;
        const int trial = cell % cfg.trials_per_n;
        const int n = cfg.n_grid[static_cast<std::size_t>(ni)];
        const Schedule sched =
            make_schedule(cfg.regime, n, cfg.target.dim, cfg.target.alpha, cfg.constants);

        RateTrialRow row;
        row.n = n;
        row.trial = trial;
        row.seed = RngStream(cfg.seed, "bench.cell", static_cast<std::uint64_t>(cell)).next_u64();
        try {
            const Dataset data = sample_dataset(target, n, cfg.noise_halfwidth, label_bound,
                                                row.seed);
            FitConfig fit_cfg;
            fit_cfg.width = sched.N_n;
            fit_cfg.mode = cfg.mode;
            fit_cfg.constraint = sched.M_n;
            fit_cfg.lambda = sched.lambda_n;
            fit_cfg.opt = cfg.opt;
            fit_cfg.seed = row.seed + 1;
            const FitResult fitted = fit(data, fit_cfg);
            const RiskEstimate risk = excess_risk(fitted.net, target,
                                                  TruncationLevel(label_bound), cfg.eval_samples,
                                                  row.seed + 2);
            row.excess_risk = risk.mean;
            row.train_mse = fitted.train_mse;
            row.kappa_reached = path_norm(fitted.net);
        } catch (const NumericError&) {
            row.diverged = true;
        }
        report.trials[static_cast<std::size_t>(cell)] = row;
    });

    std::vector<double> fit_ns, fit_risks;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        std::vector<double> risks, train, kappa;
        for (int t = 0; t < cfg.trials_per_n; ++t) {
            const auto& row = report.trials[ni * cfg.trials_per_n + t];
            if (row.diverged) continue;
            risks.push_back(row.excess_risk);
            train.push_back(row.train_mse);
            kappa.push_back(row.kappa_reached);
        }
        RateRow agg;
        agg.n = cfg.n_grid[ni];
        agg.usable = !risks.empty();
        if (agg.usable) {
            agg.excess_risk_mean = mean_of(risks);
            agg.excess_risk_stderr = stderr_of(risks, agg.excess_risk_mean);
            agg.train_mse = mean_of(train);
            agg.kappa_reached = mean_of(kappa);
            fit_ns.push_back(agg.n);
            fit_risks.push_back(agg.excess_risk_mean);
        }
        report.rows.push_back(agg);
    }

    if (fit_ns.size() >= 3) {
        const SlopeFit sf = fit_loglog_slope(fit_ns, fit_risks);
        report.fitted_slope = sf.slope;
        report.slope_stderr = sf.std_error;
    }
    return report;
}

std::string rate_report_csv(const RateReport& report) {
    std::string out = "n,trial,excess_risk,train_mse,kappa_reached,seed\n";
    for (const RateTrialRow& row : report.trials) {
        out += std::to_string(row.n);
        out += ',';
        out += std::to_string(row.trial);
        out += ',';
        out += row.diverged ? "diverged" : format_double(row.excess_risk);
        out += ',';
        out += format_double(row.train_mse);
        out += ',';
        out += format_double(row.kappa_reached);
        out += ',';
        out += std::to_string(row.seed);
        out += '\n';
    }
    return out;
}

namespace {

json config_echo(const RateExperimentConfig& cfg) {
    return json{
        {"regime", cfg.regime == Regime::Holder ? "holder" : "variation"},
        {"target",
         json{{"kind", cfg.target.kind == TargetSpec::Kind::Hat ? "hat"
                       : cfg.target.kind == TargetSpec::Kind::RadialPower ? "radial-power"
                                                                          : "variation-teacher"},
              {"dim", cfg.target.dim},
              {"alpha", cfg.target.alpha},
              {"teacher_width", cfg.target.teacher_width},
              {"teacher_seed", cfg.target.teacher_seed}}},
        {"n_grid", cfg.n_grid},
        {"trials_per_n", cfg.trials_per_n},
        {"mode", cfg.mode == FitMode::Constrained ? "constrained"
                 : cfg.mode == FitMode::PathRegularized ? "path"
                                                        : "l2"},
        {"noise_halfwidth", cfg.noise_halfwidth},
        {"label_bound", cfg.label_bound},
        {"constants",
         json{{"c_M", cfg.constants.c_M}, {"c_N", cfg.constants.c_N},
              {"c_lambda", cfg.constants.c_lambda}}},
        {"optimizer",
         json{{"step_size", cfg.opt.step_size},
              {"max_epochs", cfg.opt.max_epochs},
              {"batch", cfg.opt.batch},
              {"tolerance", cfg.opt.tolerance},
              {"restarts", cfg.opt.restarts}}},
        {"eval_samples", cfg.eval_samples},
        {"seed", cfg.seed},
        {"threads", cfg.threads}};
}

} // namespace

std::string rate_report_json(const RateReport& report) {
    json rows = json::array();
    for (const RateRow& r : report.rows) {
        rows.push_back(json{{"n", r.n},
                            {"excess_risk_mean", r.excess_risk_mean},
                            {"excess_risk_stderr", r.excess_risk_stderr},
                            {"train_mse", r.train_mse},
                            {"kappa_reached", r.kappa_reached},
                            {"usable", r.usable}});
    }
    json trials = json::array();
    for (const RateTrialRow& t : report.trials) {
        trials.push_back(json{{"n", t.n},
                              {"trial", t.trial},
                              {"excess_risk", t.excess_risk},
                              {"train_mse", t.train_mse},
                              {"kappa_reached", t.kappa_reached},
                              {"seed", t.seed},
                              {"diverged", t.diverged}});
    }
    json doc{{"format_version", kModelFormatVersion},
             {"rows", std::move(rows)},
             {"trials", std::move(trials)},
             {"fitted_slope", report.fitted_slope},
             {"slope_stderr", report.slope_stderr},
             {"theory_slope", report.theory_slope},
             {"target",
              json{{"kind", report.target_meta.kind},
                   {"alpha", report.target_meta.alpha},
                   {"smoothness_constant", report.target_meta.smoothness_constant},
                   {"sup_bound", report.target_meta.sup_bound}}},
             {"config", config_echo(report.config)}};
    return doc.dump(2);
}

std::string rate_report_svg(const RateReport& report) {
    // Static log-log scatter with the fitted and theory lines.
    const double width = 640, height = 480, margin = 60;
    std::vector<std::pair<double, double>> pts;
    for (const RateRow& r : report.rows)
        if (r.usable && r.excess_risk_mean > 0.0)
            pts.emplace_back(std::log10(static_cast<double>(r.n)),
                             std::log10(r.excess_risk_mean));
    if (pts.empty()) return "<svg xmlns='http://www.w3.org/2000/svg'/>\n";

    double x0 = pts.front().first, x1 = pts.front().first;
    double y0 = pts.front().second, y1 = pts.front().second;
    for (auto& [x, y] : pts) {
        x0 = std::min(x0, x); x1 = std::max(x1, x);
        y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
    const double pad_y = std::max(0.2, 0.1 * (y1 - y0));
    y0 -= pad_y; y1 += pad_y;
    const double pad_x = std::max(0.05, 0.05 * (x1 - x0));
    x0 -= pad_x; x1 += pad_x;
    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='black'/>\n"
        << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n"
        << "<text x='" << width / 2 << "' y='" << height - 15
        << "' text-anchor='middle' font-size='14'>log10 n</text>\n"
        << "<text x='18' y='" << height / 2
        << "' text-anchor='middle' font-size='14' transform='rotate(-90 18 " << height / 2
        << ")'>log10 excess risk</text>\n";

    // Log-log slopes carry over from natural logs to log10 axes unchanged.
    auto line_for = [&](double slope, double anchor_x, double anchor_y, const char* color) {
        const double ya = anchor_y + slope * (x0 - anchor_x);
        const double yb = anchor_y + slope * (x1 - anchor_x);
        svg << "<line x1='" << sx(x0) << "' y1='" << sy(ya) << "' x2='" << sx(x1) << "' y2='"
            << sy(yb) << "' stroke='" << color << "' stroke-width='1.5'/>\n";
    };
    const double ax = pts.front().first, ay = pts.front().second;
    line_for(report.fitted_slope, ax, ay, "#1f77b4");
    line_for(report.theory_slope, ax, ay, "#888888");

    for (auto& [x, y] : pts)
        svg << "<circle cx='" << sx(x) << "' cy='" << sy(y) << "' r='4' fill='#d62728'/>\n";
    svg << "<text x='" << width - margin << "' y='" << margin - 10
        << "' text-anchor='end' font-size='12'>fitted " << report.fitted_slope << " / theory "
        << report.theory_slope << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace srl
