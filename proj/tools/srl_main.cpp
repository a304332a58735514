#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srl/bench.hpp"
#include "srl/common.hpp"
#include "srl/complexity.hpp"
#include "srl/dataset.hpp"
#include "srl/estimators.hpp"
#include "srl/model_io.hpp"
#include "srl/rng.hpp"
#include "srl/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw srl::ConfigError("cannot write '" + path + "'");
    out << text;
}

srl::FitMode parse_mode(const std::string& mode) {
    if (mode == "constrained") return srl::FitMode::Constrained;
    if (mode == "path") return srl::FitMode::PathRegularized;
    if (mode == "l2") return srl::FitMode::L2Regularized;
    throw srl::ConfigError("unknown fit mode '" + mode + "'");
}

json optimizer_echo(const srl::OptimizerConfig& opt) {
    return json{{"step_size", opt.step_size},
                {"max_epochs", opt.max_epochs},
                {"batch", opt.batch},
                {"tolerance", opt.tolerance},
                {"restarts", opt.restarts}};
}

struct FitCli {
    std::string data_path;
    std::string out_path = "model.json";
    std::string mode = "constrained";
    double constraint = 1.0;
    double lambda = 0.01;
    int width = 8;
    srl::OptimizerConfig opt;
    std::uint64_t seed = 0;
};

int run_fit(const FitCli& cli) {
    const srl::Dataset data = srl::load_dataset_csv(cli.data_path);
    srl::FitConfig cfg;
    cfg.width = cli.width;
    cfg.mode = parse_mode(cli.mode);
    cfg.constraint = cli.constraint;
    cfg.lambda = cli.lambda;
    cfg.opt = cli.opt;
    cfg.seed = cli.seed;
    const srl::FitResult result = srl::fit(data, cfg);

    json doc = json::parse(srl::model_to_json_string(result.net));
    doc["fit"] = json{{"mode", cli.mode},
                      {"M", cli.constraint},
                      {"lambda", cli.lambda},
                      {"width", cli.width},
                      {"train_mse", result.train_mse},
                      {"penalty_value", result.penalty_value},
                      {"objective", result.objective},
                      {"epochs_used", result.epochs_used},
                      {"restart_index", result.restart_index},
                      {"kappa", srl::path_norm(result.net)},
                      {"optimizer", optimizer_echo(cli.opt)},
                      {"seed", cfg.seed},
                      {"data", cli.data_path}};
    write_text(cli.out_path, doc.dump(2) + "\n");
    std::cout << "fit: mode=" << cli.mode << " train_mse=" << result.train_mse
              << " objective=" << result.objective << " kappa=" << srl::path_norm(result.net)
              << " epochs=" << result.epochs_used << " -> " << cli.out_path << "\n";
    return kExitOk;
}

struct CanonCli {
    std::string model_path;
    std::string out_path;
};

int run_canon(const CanonCli& cli) {
    const srl::Parameterization net = srl::load_model(cli.model_path);
    const srl::DiscreteMeasure mu = srl::to_measure(net);
    const srl::CanonicalForm cf = srl::reduce(mu);
    const srl::KappaBounds kb = srl::kappa_bounds(cf);
    const auto zero = srl::is_zero_function(mu);

    std::cout << "canonical form: " << cf.ridge.size() << " ridge atom(s), linear part [";
    for (std::size_t i = 0; i < cf.linear.size(); ++i)
        std::cout << (i ? ", " : "") << cf.linear[i];
    std::cout << "]\n";
    for (const srl::MeasureAtom& a : cf.ridge) {
        std::cout << "  ridge c=" << a.coefficient << " v=[";
        for (std::size_t i = 0; i < a.direction.unit.size(); ++i)
            std::cout << (i ? ", " : "") << a.direction.unit[i];
        std::cout << "]\n";
    }
    std::cout << "kappa bounds: [" << kb.lower << ", " << kb.upper << "]"
              << " ratio=" << (kb.lower > 0.0 ? kb.upper / kb.lower : 1.0) << "\n"
              << "zero function: " << (zero.is_zero ? "true" : "false") << " (" << zero.detail
              << ")\n";

    const std::string out = cli.out_path.empty() ? cli.model_path : cli.out_path;
    json doc = json::parse(srl::model_with_canonical_json_string(net, cf, kb, zero.is_zero));
    doc["canon"] = json{{"model", cli.model_path}, {"out", out}};
    write_text(out, doc.dump(2) + "\n");
    std::cout << "augmented model -> " << out << "\n";
    return kExitOk;
}

struct ComplexityCli {
    std::string points_path;
    int uniform_n = 0;
    int dim = 1;
    double delta = 0.25;
    double norm_budget = 1.0;
    int width = 8;
    std::string cls = "nn";
    double trunc_level = 1.0;
    std::string noise = "rademacher";
    double noise_scale = 1.0;
    int replicates = 100;
    srl::InnerOptConfig inner;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_path;
};

int run_complexity(const ComplexityCli& cli) {
    std::vector<srl::Point> points;
    int dim = cli.dim;
    if (!cli.points_path.empty()) {
        const srl::Dataset data = srl::load_dataset_csv(cli.points_path);
        points = data.points();
        dim = data.dim_input();
    } else if (cli.uniform_n > 0) {
        srl::RngStream rng(cli.seed, "complexity.points");
        for (int i = 0; i < cli.uniform_n; ++i) points.push_back(srl::Point{rng.in_ball(dim)});
    } else {
        throw srl::ConfigError("complexity: provide --points or --uniform");
    }

    srl::ComplexityConfig cfg;
    cfg.n = static_cast<int>(points.size());
    cfg.norm_budget = cli.norm_budget;
    cfg.dim = dim;
    cfg.delta = cli.delta;
    if (cli.noise == "rademacher") cfg.noise = srl::NoiseKind::Rademacher;
    else if (cli.noise == "bounded") cfg.noise = srl::NoiseKind::BoundedSym;
    else if (cli.noise == "gaussian") cfg.noise = srl::NoiseKind::Gaussian;
    else throw srl::ConfigError("complexity: unknown noise kind '" + cli.noise + "'");
    cfg.noise_scale = cli.noise_scale;
    cfg.mc_replicates = cli.replicates;
    cfg.inner = cli.inner;
    cfg.seed = cli.seed;
    cfg.width = cli.width;
    cfg.threads = cli.threads;

    srl::FunctionClassSpec cls;
    if (cli.cls == "nn") cls.kind = srl::FunctionClassSpec::Kind::NormBall;
    else if (cli.cls == "star-trunc") {
        cls.kind = srl::FunctionClassSpec::Kind::StarTruncated;
        cls.trunc_level = cli.trunc_level;
    } else {
        throw srl::ConfigError("complexity: unknown class '" + cli.cls + "'");
    }

    const srl::ComplexityEstimate est = srl::mc_local_complexity(points, cfg, cls);
    json doc{{"format_version", srl::kModelFormatVersion},
             {"mc_value", est.mc_value},
             {"std_error", est.std_error},
             {"analytic_bound", est.analytic_bound},
             {"dudley_bound", est.dudley_bound},
             {"note", "mc_value is a lower estimate: the inner maximization is approximate"},
             {"config_echo",
              json{{"n", cfg.n},
                   {"d", cfg.dim},
                   {"delta", cfg.delta},
                   {"M", cfg.norm_budget},
                   {"width", cfg.width},
                   {"class", cli.cls},
                   {"trunc_level", cli.trunc_level},
                   {"noise", cli.noise},
                   {"noise_scale", cfg.noise_scale},
                   {"replicates", cfg.mc_replicates},
                   {"inner",
                    json{{"steps", cfg.inner.steps},
                         {"step_size", cfg.inner.step_size},
                         {"restarts", cfg.inner.restarts}}},
                   {"seed", cfg.seed},
                   {"threads", cfg.threads}}}};
    const std::string text = doc.dump(2) + "\n";
    if (!cli.out_path.empty()) write_text(cli.out_path, text);
    std::cout << text;
    return kExitOk;
}

struct BenchCli {
    std::string regime = "variation";
    std::string target;
    double alpha = 1.0;
    int dim = 1;
    std::string mode;
    std::vector<int> n_grid = {64, 128, 256, 512, 1024, 2048, 4096};
    int trials = 5;
    int teacher_width = 8;
    std::uint64_t teacher_seed = 0;
    double noise = 0.4;
    double label_bound = 0.0;
    double c_M = 1.0, c_N = 1.0, c_lambda = 1.0;
    srl::OptimizerConfig opt;
    int eval_samples = 20000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_path;
    std::string csv_path;
    std::string svg_path;
};

int run_bench(const BenchCli& cli) {
    srl::RateExperimentConfig cfg;
    if (cli.regime == "holder") cfg.regime = srl::Regime::Holder;
    else if (cli.regime == "variation") cfg.regime = srl::Regime::Variation;
    else throw srl::ConfigError("bench: unknown regime '" + cli.regime + "'");

    std::string target = cli.target;
    if (target.empty()) target = cfg.regime == srl::Regime::Holder ? "hat" : "teacher";
    if (target == "hat") cfg.target.kind = srl::TargetSpec::Kind::Hat;
    else if (target == "radial-power") cfg.target.kind = srl::TargetSpec::Kind::RadialPower;
    else if (target == "teacher") cfg.target.kind = srl::TargetSpec::Kind::VariationTeacher;
    else throw srl::ConfigError("bench: unknown target '" + target + "'");
    cfg.target.dim = cli.dim;
    cfg.target.alpha = cli.alpha;
    cfg.target.teacher_width = cli.teacher_width;
    cfg.target.teacher_seed = cli.teacher_seed;

    cfg.mode = cli.mode.empty()
                   ? (cfg.regime == srl::Regime::Holder ? srl::FitMode::Constrained
                                                        : srl::FitMode::PathRegularized)
                   : parse_mode(cli.mode);
    cfg.n_grid = cli.n_grid;
    cfg.trials_per_n = cli.trials;
    cfg.noise_halfwidth = cli.noise;
    cfg.label_bound = cli.label_bound;
    cfg.constants = {cli.c_M, cli.c_N, cli.c_lambda};
    cfg.opt = cli.opt;
    cfg.eval_samples = cli.eval_samples;
    cfg.seed = cli.seed;
    cfg.threads = cli.threads;

    const srl::RateReport report = srl::run_rate_experiment(cfg);
    std::cout << "bench: fitted slope " << report.fitted_slope << " +- " << report.slope_stderr
              << " (theory " << report.theory_slope << ")\n";
    for (const srl::RateRow& row : report.rows) {
        std::cout << "  n=" << row.n << " risk=" << row.excess_risk_mean << " +- "
                  << row.excess_risk_stderr << " train_mse=" << row.train_mse
                  << " kappa=" << row.kappa_reached << (row.usable ? "" : " [diverged]") << "\n";
    }
    if (!cli.out_path.empty()) write_text(cli.out_path, srl::rate_report_json(report) + "\n");
    if (!cli.csv_path.empty()) write_text(cli.csv_path, srl::rate_report_csv(report));
    if (!cli.svg_path.empty()) write_text(cli.svg_path, srl::rate_report_svg(report));
    return kExitOk;
}

struct VerifyCli {
    std::string suite = "all";
    std::string out_path;
};

int run_verify(const VerifyCli& cli) {
    const auto results = srl::verify::run(cli.suite);
    int failed = 0;
    for (const auto& suite : results) {
        for (const auto& check : suite.checks) {
            std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << suite.suite << ": " << check.name;
            if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
            std::cout << "\n";
            if (!check.pass) ++failed;
        }
    }
    const std::string text = srl::verify::to_json(results) + "\n";
    if (!cli.out_path.empty()) write_text(cli.out_path, text);
    std::cout << (failed == 0 ? "verify: all checks passed\n"
                              : "verify: " + std::to_string(failed) + " check(s) failed\n");
    return failed == 0 ? kExitOk : kExitVerification;
}

void add_optimizer_flags(CLI::App* cmd, srl::OptimizerConfig& opt) {
    cmd->add_option("--step", opt.step_size, "gradient step size");
    cmd->add_option("--epochs", opt.max_epochs, "maximum full-batch epochs");
    cmd->add_option("--batch", opt.batch, "mini-batch size (0 = full batch)");
    cmd->add_option("--tolerance", opt.tolerance, "convergence tolerance over 50 epochs");
    cmd->add_option("--restarts", opt.restarts, "random restarts");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shallow ReLU regression toolkit: path norms, canonical forms, "
                 "norm-controlled least squares, local complexity, rate benchmarks"};
    app.require_subcommand(1);
    // Usage: srl --config run.toml <subcommand>; the file holds one
    // [subcommand] table per command, flags win, unknown keys error out.
    app.set_config("--config", "", "TOML config file mirroring the flags (flags win)");
    app.allow_config_extras(CLI::config_extras_mode::error);

    FitCli fit_cli;
    auto* fit_cmd = app.add_subcommand("fit", "train a norm-controlled least squares estimator");
    fit_cmd->add_option("--data", fit_cli.data_path, "training CSV (header x1,...,xd,y)")
        ->required();
    fit_cmd->add_option("--mode", fit_cli.mode, "constrained | path | l2");
    fit_cmd->add_option("--M", fit_cli.constraint, "path-norm budget (constrained mode)");
    fit_cmd->add_option("--lambda", fit_cli.lambda, "penalty weight (path/l2 modes)");
    fit_cmd->add_option("--width", fit_cli.width, "network width N");
    add_optimizer_flags(fit_cmd, fit_cli.opt);
    fit_cmd->add_option("--seed", fit_cli.seed, "root seed")->envname("SRL_SEED");
    fit_cmd->add_option("--out", fit_cli.out_path, "output model file");

    CanonCli canon_cli;
    auto* canon_cmd = app.add_subcommand("canon", "canonical form, kappa interval, zero test");
    canon_cmd->add_option("--model", canon_cli.model_path, "model JSON file")->required();
    canon_cmd->add_option("--out", canon_cli.out_path,
                          "augmented model output (default: in place)");

    ComplexityCli cx_cli;
    auto* cx_cmd = app.add_subcommand("complexity", "Monte-Carlo local complexity + bounds");
    cx_cmd->add_option("--points", cx_cli.points_path, "sample points CSV");
    cx_cmd->add_option("--uniform", cx_cli.uniform_n, "draw this many uniform ball points");
    cx_cmd->add_option("--d", cx_cli.dim, "input dimension for --uniform");
    cx_cmd->add_option("--delta", cx_cli.delta, "localization radius");
    cx_cmd->add_option("--M", cx_cli.norm_budget, "path-norm budget");
    cx_cmd->add_option("--width", cx_cli.width, "network width of the class");
    cx_cmd->add_option("--class", cx_cli.cls, "nn | star-trunc");
    cx_cmd->add_option("--trunc-level", cx_cli.trunc_level, "B for star-trunc");
    cx_cmd->add_option("--noise", cx_cli.noise, "rademacher | bounded | gaussian");
    cx_cmd->add_option("--noise-scale", cx_cli.noise_scale, "B or varsigma");
    cx_cmd->add_option("--replicates", cx_cli.replicates, "Monte-Carlo replicates");
    cx_cmd->add_option("--inner-steps", cx_cli.inner.steps, "ascent steps per restart");
    cx_cmd->add_option("--inner-step-size", cx_cli.inner.step_size, "ascent step size");
    cx_cmd->add_option("--inner-restarts", cx_cli.inner.restarts, "ascent restarts");
    cx_cmd->add_option("--seed", cx_cli.seed, "root seed")->envname("SRL_SEED");
    cx_cmd->add_option("--threads", cx_cli.threads, "worker cap (1 = bit-reproducible)");
    cx_cmd->add_option("--out", cx_cli.out_path, "output JSON file");

    BenchCli bench_cli;
    auto* bench_cmd = app.add_subcommand("bench", "convergence-rate benchmark");
    bench_cmd->add_option("--regime", bench_cli.regime, "holder | variation");
    bench_cmd->add_option("--target", bench_cli.target,
                          "hat | radial-power | teacher (default by regime)");
    bench_cmd->add_option("--alpha", bench_cli.alpha, "Holder smoothness");
    bench_cmd->add_option("--d", bench_cli.dim, "input dimension");
    bench_cmd->add_option("--mode", bench_cli.mode, "constrained | path | l2");
    bench_cmd->add_option("--n-grid", bench_cli.n_grid, "sample sizes")->delimiter(',');
    bench_cmd->add_option("--trials", bench_cli.trials, "trials per n");
    bench_cmd->add_option("--teacher-width", bench_cli.teacher_width, "teacher network width");
    bench_cmd->add_option("--teacher-seed", bench_cli.teacher_seed, "teacher seed");
    bench_cmd->add_option("--noise", bench_cli.noise, "uniform noise halfwidth");
    bench_cmd->add_option("--label-bound", bench_cli.label_bound,
                          "B (default sup|h| + noise)");
    bench_cmd->add_option("--c-M", bench_cli.c_M, "schedule multiplier for M_n");
    bench_cmd->add_option("--c-N", bench_cli.c_N, "schedule multiplier for N_n");
    bench_cmd->add_option("--c-lambda", bench_cli.c_lambda, "schedule multiplier for lambda_n");
    add_optimizer_flags(bench_cmd, bench_cli.opt);
    bench_cmd->add_option("--m", bench_cli.eval_samples, "risk evaluation samples");
    bench_cmd->add_option("--seed", bench_cli.seed, "root seed")->envname("SRL_SEED");
    bench_cmd->add_option("--threads", bench_cli.threads, "worker cap (1 = bit-reproducible)");
    bench_cmd->add_option("--out", bench_cli.out_path, "report JSON");
    bench_cmd->add_option("--csv", bench_cli.csv_path, "per-trial CSV");
    bench_cmd->add_option("--svg", bench_cli.svg_path, "static log-log scatter");

    VerifyCli verify_cli;
    auto* verify_cmd = app.add_subcommand("verify", "run the property suites");
    verify_cmd->add_option("--suite", verify_cli.suite,
                           "all | canonical | rescale | complexity | rates");
    verify_cmd->add_option("--out", verify_cli.out_path, "machine-readable summary JSON");

    try {
        app.parse(argc, argv);
        if (fit_cmd->parsed()) return run_fit(fit_cli);
        if (canon_cmd->parsed()) return run_canon(canon_cli);
        if (cx_cmd->parsed()) return run_complexity(cx_cli);
        if (bench_cmd->parsed()) return run_bench(bench_cli);
        if (verify_cmd->parsed()) return run_verify(verify_cli);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const srl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const srl::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
