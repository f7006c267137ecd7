// Command-line front end: simulate panels, fit GLMs, denoise a target
// series, tabulate residuals and run the synthetic benchmark sweep.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sglm/benchmark.hpp"
#include "sglm/inference.hpp"
#include "sglm/panel_io.hpp"
#include "sglm/residuals.hpp"
#include "sglm/sibling.hpp"
#include "sglm/simulate.hpp"

namespace {

using namespace sglm;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Options {
    std::string family = "poisson";
    double dispersion = 0.0;  // 0: family default
    Index m = 120;
    Index q = 20;
    std::vector<Index> q_grid{2, 6, 11, 21};
    int replicates = 200;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool step3_with_x = false;
    std::string noise_strategy = "regression";
    std::string input;
    std::string output;
    std::string proxy_column;
    std::string target;
    std::vector<std::string> estimators{"glm", "sglm"};
    std::string estimator = "sglm";
    std::vector<std::string> residual_kinds{"fisher"};
    std::string residual = "fisher";
    double sigma_eps = 0.1;
    std::optional<double> wn_fixed;
    std::optional<double> wx_fixed;
    std::optional<double> offset;
};

Family make_family(const Options& o) {
    const FamilyKind kind = parse_family_kind(o.family);
    double d = o.dispersion;
    if (d == 0.0) d = kind == FamilyKind::Gamma ? 2.0 : 1.0;
    return Family(kind, d);
}

std::string num(double v) { return io::format_number(v); }

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

std::vector<std::string> header(const std::string& command, const Options& o, const Family& f,
                                std::vector<std::pair<std::string, std::string>> extra) {
    std::vector<std::string> lines{"command=" + command, "family=" + std::string(f.name()),
                                   "dispersion=" + num(f.dispersion())};
    for (auto& [k, v] : extra) lines.push_back(k + "=" + v);
    if (!o.input.empty()) lines.push_back("input=" + o.input);
    return lines;
}

std::string sidecar(const std::string& output, const std::string& suffix) {
    const auto dot = output.rfind('.');
    const auto slash = output.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return output + suffix + ".csv";
    return output.substr(0, dot) + suffix + output.substr(dot);
}

// Panel file -> design [1, x_*] and the response matrix.
struct LoadedPanel {
    io::PanelData data;
    Design design;
};

LoadedPanel load_panel(const std::string& path) {
    io::PanelData data = io::panel_from_table(io::read_table_file(path));
    Design design = Design::with_intercept(data.x, data.x_names);
    return {std::move(data), std::move(design)};
}

Index target_index(const io::PanelData& data, const std::string& target) {
    if (target.empty()) return 0;
    const Index idx = data.y_index(target);
    if (idx < 0) throw ConfigError("unknown target series '" + target + "'");
    return idx;
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const Options& o) {
    const Family f = make_family(o);
    SimConfig c;
    c.family = f;
    c.m = o.m;
    c.q = o.q;
    c.sigma_eps = o.sigma_eps;
    c.seed = o.seed;
    c.scheme.fixed_wn = o.wn_fixed;
    c.scheme.fixed_wx = o.wx_fixed;
    c.offset = o.offset;
    const SimTruth truth = simulate::generate(c);
    io::PanelData panel = io::panel_from_truth(truth);
    panel.comments = header("simulate", o, f,
                            {{"m", std::to_string(o.m)},
                             {"q", std::to_string(o.q)},
                             {"seed", std::to_string(o.seed)},
                             {"sigma_eps", num(o.sigma_eps)},
                             {"wn_fixed", o.wn_fixed ? num(*o.wn_fixed) : "none"},
                             {"wx_fixed", o.wx_fixed ? num(*o.wx_fixed) : "none"},
                             {"offset", o.offset ? num(*o.offset) : "default"}});
    io::write_table_file(o.output, io::table_from_panel(panel));
    std::cout << "seed=" << o.seed << '\n';
    return 0;
}

// --- fit ------------------------------------------------------------------

int cmd_fit(const Options& o) {
    const Family f = make_family(o);
    const LoadedPanel lp = load_panel(o.input);
    io::TextTable out;
    out.comments = header("fit", o, f, {});
    out.columns = {"series", "term", "estimate", "std_error", "model_std_error",
                   "converged", "iterations", "loglik"};
    for (Index j = 0; j < lp.data.y.cols(); ++j) {
        const VectorXd y = lp.data.y.col(j);
        GlmFit fit = [&] {
            try {
                return glm::fit(lp.design, y, f);
            } catch (const Error& e) {
                throw SeriesFitError(static_cast<std::size_t>(j), e.error_class(),
                                     "'" + lp.data.y_names[j] + "': " + e.what());
            }
        }();
        const SandwichCovariance cov = inference::sandwich(fit, lp.design, y);
        const MatrixXd model = inference::inverse_fisher(fit, lp.design);
        for (Index k = 0; k < fit.n_coef(); ++k)
            out.rows.push_back({lp.data.y_names[j], lp.design.column_names()[k], num(fit.beta[k]),
                                num(cov.standard_errors[k]),
                                num(std::sqrt(model(k, k) / static_cast<double>(fit.n_obs()))),
                                fit.converged ? "1" : "0", std::to_string(fit.iterations),
                                num(fit.loglik)});
    }
    io::write_text_table_file(o.output, out);
    return 0;
}

// --- denoise --------------------------------------------------------------

int cmd_denoise(const Options& o) {
    const Family f = make_family(o);
    const LoadedPanel lp = load_panel(o.input);
    const Index target = target_index(lp.data, o.target);
    const Panel panel(lp.design, lp.data.y, target, f);
    const Estimator est = parse_estimator(o.estimator);
    const Index m = panel.n_obs();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    VectorXd noise_hat = VectorXd::Constant(m, nan);
    VectorXd z_hat, mu_hat = VectorXd::Constant(m, nan);
    std::vector<std::pair<std::string, std::string>> summary{
        {"estimator", std::string(estimator_name(est))},
        {"family", std::string(f.name())},
        {"target", lp.data.y_names[static_cast<std::size_t>(target)]},
        {"n_obs", std::to_string(m)},
        {"n_series", std::to_string(panel.n_series())}};
    std::optional<double> slope;

    auto report_fit = [&](const GlmFit& fit, const Design& design) {
        const SandwichCovariance cov = inference::sandwich(fit, design, panel.target());
        for (Index k = 0; k < fit.n_coef(); ++k) {
            summary.emplace_back("coef_" + design.column_names()[k], num(fit.beta[k]));
            summary.emplace_back("se_" + design.column_names()[k], num(cov.standard_errors[k]));
        }
        summary.emplace_back("converged", fit.converged ? "1" : "0");
        summary.emplace_back("iterations", std::to_string(fit.iterations));
        summary.emplace_back("loglik", num(fit.loglik));
    };

    try {
    switch (est) {
    case Estimator::Glm: {
        const GlmFit fit = glm::fit(panel.design(), panel.target(), f);
        z_hat = fit.eta;
        mu_hat = fit.mu;
        report_fit(fit, panel.design());
        if (fit.n_coef() > 1) slope = fit.beta[1];
        break;
    }
    case Estimator::Sglm: {
        SglmOptions opts;
        opts.noise.residual_kind = parse_residual_kind(o.residual);
        opts.noise.include_x_in_step3 = o.step3_with_x;
        opts.noise.strategy = parse_noise_strategy(o.noise_strategy);
        const SglmResult res = sibling::sglm_denoise(panel, opts);
        noise_hat = res.noise_hat;
        z_hat = res.z_hat;
        mu_hat = res.refit.mu;
        report_fit(res.refit, panel.design().append_column(res.noise_hat, "noise_hat"));
        summary.emplace_back("residual", std::string(residual_kind_name(opts.noise.residual_kind)));
        summary.emplace_back("noise_strategy", std::string(noise_strategy_name(opts.noise.strategy)));
        summary.emplace_back("step3_with_x", o.step3_with_x ? "1" : "0");
        summary.emplace_back("r2_step3", num(res.diagnostics.r2_step3));
        summary.emplace_back("r2_baseline", num(res.diagnostics.r2_baseline));
        if (res.refit.n_coef() > 2) slope = res.refit.beta[1];
        break;
    }
    case Estimator::HalfSibling:
    case Estimator::ThreeQuarter: {
        const MatrixXd t = transform_observations(f, panel.responses());
        MatrixXd aux(m, t.cols() - 1);
        for (Index j = 0, k = 0; j < t.cols(); ++j)
            if (j != target) aux.col(k++) = t.col(j);
        const VectorXd t1 = t.col(target);
        z_hat = est == Estimator::HalfSibling ? sibling::half_sibling(t1, aux)
                                              : sibling::three_quarter_sibling(lp.data.x, t1, aux);
        noise_hat = t1 - z_hat;
        const VectorXd coef = glm::ols(panel.design().x(), z_hat);
        for (Index k = 0; k < coef.size(); ++k)
            summary.emplace_back("coef_" + panel.design().column_names()[k], num(coef[k]));
        if (coef.size() > 1) slope = coef[1];
        break;
    }
    }
    } catch (const SeriesFitError& e) {
        // report the series by name; the index in the message is panel-relative
        std::string detail = e.what();
        if (const auto pos = detail.find(": "); pos != std::string::npos) detail = detail.substr(pos + 2);
        throw SeriesFitError(e.series(), e.inner_class(),
                             "'" + lp.data.y_names[e.series()] + "': " + detail);
    }

    // Ground truth passthrough.
    const std::string tname = lp.data.y_names[static_cast<std::size_t>(target)];
    const Index z_col = lp.data.truth_index("z_" + tname);
    if (z_col >= 0) {
        const Index off_col = lp.data.truth_index("offset");
        VectorXd signal = lp.data.truth.col(z_col);
        if (off_col >= 0) signal += lp.data.truth.col(off_col);
        summary.emplace_back("mse", num((z_hat - signal).squaredNorm() / static_cast<double>(m)));
        const Index wx_col = lp.data.truth_index("wx_" + tname);
        if (wx_col >= 0 && slope) {
            const double w = lp.data.truth(0, wx_col);
            summary.emplace_back("bias", num((*slope - w) / w));
        }
        const Index n_col = lp.data.truth_index("noise");
        if (n_col >= 0 && est != Estimator::Glm)
            summary.emplace_back("noise_corr", num(simulate::pearson(noise_hat, lp.data.truth.col(n_col))));
    }

    const auto comments = header("denoise", o, f,
                                 {{"estimator", std::string(estimator_name(est))},
                                  {"residual", o.residual},
                                  {"noise_strategy", o.noise_strategy},
                                  {"step3_with_x", o.step3_with_x ? "1" : "0"},
                                  {"target", tname}});
    io::Table table;
    table.comments = comments;
    table.columns = {"obs", "noise_hat", "z_hat", "mu_hat"};
    table.data.resize(m, 4);
    for (Index i = 0; i < m; ++i) table.data.row(i) << double(i), noise_hat[i], z_hat[i], mu_hat[i];
    io::write_table_file(o.output, table);

    io::TextTable sum;
    sum.comments = comments;
    sum.columns = {"key", "value"};
    for (auto& [k, v] : summary) sum.rows.push_back({k, v});
    io::write_text_table_file(sidecar(o.output, ".summary"), sum);
    return 0;
}

// --- residuals ------------------------------------------------------------

int cmd_residuals(const Options& o) {
    const Family f = make_family(o);
    const LoadedPanel lp = load_panel(o.input);
    const io::Table raw_table = io::read_table_file(o.input);
    std::optional<VectorXd> proxy;
    if (!o.proxy_column.empty()) {
        const Index c = raw_table.column_index(o.proxy_column);
        if (c < 0) throw ConfigError("unknown proxy column '" + o.proxy_column + "'");
        proxy = raw_table.data.col(c);
    }

    const std::vector<ResidualKind> kinds{ResidualKind::Raw, ResidualKind::Student,
                                          ResidualKind::Deviance, ResidualKind::FisherScaled};
    const Index m = lp.data.n_obs();
    const Index q = lp.data.y.cols();
    io::Table table;
    table.comments = header("residuals", o, f, {{"proxy_column", o.proxy_column.empty() ? "none" : o.proxy_column}});
    table.columns = {"obs"};
    table.data.resize(m, 1 + q * static_cast<Index>(kinds.size()));
    table.data.col(0) = VectorXd::LinSpaced(m, 0.0, static_cast<double>(m - 1));
    io::TextTable corr;
    corr.comments = table.comments;
    corr.columns = {"series", "residual", "correlation"};

    Index col = 1;
    for (Index j = 0; j < q; ++j) {
        const VectorXd y = lp.data.y.col(j);
        const std::string& name = lp.data.y_names[static_cast<std::size_t>(j)];
        GlmFit fit = [&] {
            try {
                return glm::fit(lp.design, y, f);
            } catch (const Error& e) {
                throw SeriesFitError(static_cast<std::size_t>(j), e.error_class(),
                                     "'" + name + "': " + e.what());
            }
        }();
        for (ResidualKind k : kinds) {
            const VectorXd r = residuals::compute(k, fit, lp.design, y,
                                                  residuals::SaturatedPolicy::Zero).values;
            table.columns.push_back(name + "_" + std::string(residual_kind_name(k)));
            table.data.col(col++) = r;
            if (proxy)
                corr.rows.push_back({name, std::string(residual_kind_name(k)),
                                     num(simulate::pearson(r, *proxy))});
        }
    }
    io::write_table_file(o.output, table);
    if (proxy) io::write_text_table_file(sidecar(o.output, ".proxy"), corr);
    return 0;
}

// --- benchmark ------------------------------------------------------------

int cmd_benchmark(const Options& o) {
    const Family f = make_family(o);
    BenchmarkConfig c;
    c.family = f;
    c.m = o.m;
    c.q_grid = o.q_grid;
    c.estimators.clear();
    for (const auto& e : o.estimators) c.estimators.push_back(parse_estimator(e));
    c.residual_kinds.clear();
    for (const auto& r : o.residual_kinds) c.residual_kinds.push_back(parse_residual_kind(r));
    c.replicates = o.replicates;
    c.seed = o.seed;
    c.sigma_eps = o.sigma_eps;
    c.scheme.fixed_wn = o.wn_fixed;
    c.scheme.fixed_wx = o.wx_fixed;
    c.offset = o.offset;
    c.step3_with_x = o.step3_with_x;
    c.noise_strategy = parse_noise_strategy(o.noise_strategy);
    c.jobs = o.jobs;

    const auto cells = benchmark::run(c);

    std::vector<std::string> grid;
    for (Index q : o.q_grid) grid.push_back(std::to_string(q));
    io::TextTable out;
    out.comments = header("benchmark", o, f,
                          {{"m", std::to_string(o.m)},
                           {"q_grid", join(grid)},
                           {"estimators", join(o.estimators)},
                           {"residuals", join(o.residual_kinds)},
                           {"replicates", std::to_string(o.replicates)},
                           {"seed", std::to_string(o.seed)},
                           {"sigma_eps", num(o.sigma_eps)},
                           {"wn_fixed", o.wn_fixed ? num(*o.wn_fixed) : "none"},
                           {"wx_fixed", o.wx_fixed ? num(*o.wx_fixed) : "none"},
                           {"offset", o.offset ? num(*o.offset) : "default"},
                           {"step3_with_x", o.step3_with_x ? "1" : "0"},
                           {"noise_strategy", o.noise_strategy}});
    out.columns = {"family", "q", "estimator", "residual", "metric", "mean", "se", "n", "n_failed"};
    for (const auto& cell : cells) {
        const std::string kind = cell.residual_kind ? std::string(residual_kind_name(*cell.residual_kind)) : "none";
        const std::pair<const char*, MetricSummary> metrics[] = {
            {"mse", cell.mse()}, {"bias", cell.bias()}, {"abs_bias", cell.abs_bias()},
            {"noise_corr", cell.noise_corr()}};
        for (const auto& [name, s] : metrics)
            out.rows.push_back({std::string(f.name()), std::to_string(cell.q),
                                std::string(estimator_name(cell.estimator)), kind, name, num(s.mean),
                                num(s.se), std::to_string(s.n), std::to_string(cell.n_failed())});
        std::cerr << "cell " << cell.label() << ": " << cell.seconds << " s, "
                  << cell.n_failed() << " failed";
        if (!cell.errors.empty()) std::cerr << " (first: " << cell.errors.front() << ")";
        std::cerr << '\n';
    }
    io::write_text_table_file(o.output, out);
    return 0;
}

void add_family(CLI::App* sub, Options& o) {
    sub->add_option("--family", o.family, "gaussian, poisson, bernoulli or gamma")->capture_default_str();
    sub->add_option("--dispersion", o.dispersion,
                    "Gaussian variance or Gamma shape (default 1, Gamma 2)");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Sibling regression for generalized linear models"};
    app.set_config("--config", "", "TOML/INI file with option defaults");
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic noise-confounded panel");
    add_family(sim, o);
    sim->add_option("--m", o.m, "Observations")->check(CLI::Range(Index{2}, Index{1} << 40))->capture_default_str();
    sim->add_option("--q", o.q, "Series (target + auxiliaries)")->check(CLI::Range(Index{2}, Index{1} << 20))->capture_default_str();
    sim->add_option("--seed", o.seed)->capture_default_str();
    sim->add_option("--sigma-eps", o.sigma_eps)->check(CLI::NonNegativeNumber)->capture_default_str();
    sim->add_option("--wn-fixed", o.wn_fixed, "Use this noise weight for every series");
    sim->add_option("--wx-fixed", o.wx_fixed, "Use this covariate weight for every series");
    sim->add_option("--offset", o.offset, "Constant added to every natural parameter");
    sim->add_option("--output", o.output)->required();

    auto* fit = app.add_subcommand("fit", "Fit a GLM to every response series");
    add_family(fit, o);
    fit->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    fit->add_option("--output", o.output)->required();

    auto* den = app.add_subcommand("denoise", "Denoise the target series");
    add_family(den, o);
    den->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    den->add_option("--output", o.output)->required();
    den->add_option("--estimator", o.estimator, "glm, half_sibling, three_quarter or sglm")->capture_default_str();
    den->add_option("--residual", o.residual, "fisher, raw, student or deviance")->capture_default_str();
    den->add_flag("--step3-with-x", o.step3_with_x, "Condition the residual regressions on X");
    den->add_option("--noise-strategy", o.noise_strategy, "regression or mean_of_residuals")->capture_default_str();
    den->add_option("--target", o.target, "Response name without the y_ prefix (default: first)");

    auto* res = app.add_subcommand("residuals", "Tabulate the four residual kinds per series");
    add_family(res, o);
    res->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    res->add_option("--output", o.output)->required();
    res->add_option("--proxy-column", o.proxy_column, "Column to correlate residuals with");

    auto* bench = app.add_subcommand("benchmark", "Monte-Carlo sweep over q, estimators and residual kinds");
    add_family(bench, o);
    bench->add_option("--m", o.m)->check(CLI::Range(Index{2}, Index{1} << 40))->capture_default_str();
    bench->add_option("--q-grid", o.q_grid, "Comma-separated series counts")->delimiter(',')->check(CLI::Range(Index{2}, Index{1} << 20));
    bench->add_option("--estimator", o.estimators, "Comma-separated estimators")->delimiter(',');
    bench->add_option("--residual", o.residual_kinds, "Comma-separated residual kinds")->delimiter(',');
    bench->add_option("--replicates", o.replicates)->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--seed", o.seed)->capture_default_str();
    bench->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--sigma-eps", o.sigma_eps)->check(CLI::NonNegativeNumber)->capture_default_str();
    bench->add_option("--wn-fixed", o.wn_fixed);
    bench->add_option("--wx-fixed", o.wx_fixed);
    bench->add_option("--offset", o.offset);
    bench->add_flag("--step3-with-x", o.step3_with_x);
    bench->add_option("--noise-strategy", o.noise_strategy)->capture_default_str();
    bench->add_option("--output", o.output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 64;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*fit) return cmd_fit(o);
        if (*den) return cmd_denoise(o);
        if (*res) return cmd_residuals(o);
        if (*bench) return cmd_benchmark(o);
    } catch (const sglm::Error& e) {
        std::cerr << "error: " << e.error_class() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 70;
    }
    return 64;
}
