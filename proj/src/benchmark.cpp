#include "sglm/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "sglm/rng.hpp"

namespace sglm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view estimator_name(Estimator e) noexcept {
    switch (e) {
    case Estimator::Glm: return "glm";
    case Estimator::HalfSibling: return "half_sibling";
    case Estimator::ThreeQuarter: return "three_quarter";
    case Estimator::Sglm: return "sglm";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "glm") return Estimator::Glm;
    if (name == "half_sibling" || name == "hs") return Estimator::HalfSibling;
    if (name == "three_quarter" || name == "3qs") return Estimator::ThreeQuarter;
    if (name == "sglm") return Estimator::Sglm;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

MatrixXd transform_observations(const Family& family, const MatrixXd& y) {
    switch (family.kind()) {
    case FamilyKind::Poisson: return y.array().log1p().matrix();
    case FamilyKind::Gamma: return y.array().log().matrix();
    default: return y;
    }
}

namespace {

template <typename Get>
MetricSummary summarize_records(const std::vector<std::optional<MetricsRecord>>& recs, Get get) {
    std::vector<double> vals;
    for (const auto& r : recs)
        if (r)
            if (auto v = get(*r)) vals.push_back(*v);
    return benchmark::summarize(vals);
}

}  // namespace

int BenchmarkCell::n_failed() const {
    return static_cast<int>(std::count(replicates.begin(), replicates.end(), std::nullopt));
}

MetricSummary BenchmarkCell::mse() const {
    return summarize_records(replicates, [](const MetricsRecord& r) { return std::optional(r.mse); });
}

MetricSummary BenchmarkCell::bias() const {
    return summarize_records(replicates, [](const MetricsRecord& r) { return r.bias; });
}

MetricSummary BenchmarkCell::abs_bias() const {
    return summarize_records(replicates, [](const MetricsRecord& r) {
        return r.bias ? std::optional(std::abs(*r.bias)) : std::nullopt;
    });
}

MetricSummary BenchmarkCell::noise_corr() const {
    return summarize_records(replicates, [](const MetricsRecord& r) { return r.noise_corr; });
}

std::string BenchmarkCell::label() const {
    std::string s = "q=" + std::to_string(q) + " " + std::string(estimator_name(estimator));
    if (residual_kind) s += "/" + std::string(residual_kind_name(*residual_kind));
    return s;
}

namespace benchmark {

namespace {

struct CellSpec {
    Index q;
    Estimator estimator;
    std::optional<ResidualKind> kind;
};

std::vector<CellSpec> expand(const BenchmarkConfig& c) {
    std::vector<CellSpec> cells;
    for (Index q : c.q_grid)
        for (Estimator e : c.estimators) {
            if (e == Estimator::Sglm)
                for (ResidualKind k : c.residual_kinds) cells.push_back({q, e, k});
            else
                cells.push_back({q, e, std::nullopt});
        }
    return cells;
}

MetricsRecord evaluate(const CellSpec& cell, const SimTruth& truth, const Panel& panel,
                       const BenchmarkConfig& config) {
    switch (cell.estimator) {
    case Estimator::Glm:
        return simulate::metrics(truth, glm::fit(panel.design(), panel.target(), panel.family()));
    case Estimator::Sglm: {
        SglmOptions opts;
        opts.noise.residual_kind = *cell.kind;
        opts.noise.include_x_in_step3 = config.step3_with_x;
        opts.noise.strategy = config.noise_strategy;
        return simulate::metrics(truth, sibling::sglm_denoise(panel, opts));
    }
    case Estimator::HalfSibling:
    case Estimator::ThreeQuarter: {
        const MatrixXd t = transform_observations(panel.family(), panel.responses());
        MatrixXd aux(t.rows(), t.cols() - 1);
        for (Index j = 1; j < t.cols(); ++j) aux.col(j - 1) = t.col(j);
        const VectorXd z_hat = cell.estimator == Estimator::HalfSibling
                                   ? sibling::half_sibling(t.col(0), aux)
                                   : sibling::three_quarter_sibling(truth.x, t.col(0), aux);
        const VectorXd slope = glm::ols(panel.design().x(), z_hat);
        return simulate::metrics(truth, z_hat, slope[1]);
    }
    }
    throw ConfigError("unknown estimator");
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
    Rng rng = child_rng(master, {0x5eed, static_cast<std::uint64_t>(replicate)});
    return rng();
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.n = static_cast<int>(values.size());
    if (s.n == 0) {
        s.mean = s.se = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / (s.n - 1) / s.n);
    }
    return s;
}

std::vector<BenchmarkCell> run(const BenchmarkConfig& config) {
    if (config.q_grid.empty()) throw ConfigError("q grid is empty");
    if (config.replicates < 1) throw ConfigError("replicates must be at least 1");
    for (Index q : config.q_grid)
        if (q < 2) throw ConfigError("q grid entries must be >= 2");
    if (config.estimators.empty()) throw ConfigError("no estimators requested");

    const std::vector<CellSpec> specs = expand(config);
    std::vector<BenchmarkCell> cells(specs.size());
    for (std::size_t c = 0; c < specs.size(); ++c) {
        cells[c].q = specs[c].q;
        cells[c].estimator = specs[c].estimator;
        cells[c].residual_kind = specs[c].kind;
        cells[c].replicates.assign(static_cast<std::size_t>(config.replicates), std::nullopt);
        cells[c].errors.assign(static_cast<std::size_t>(config.replicates), {});
    }
    std::vector<std::vector<double>> seconds(
        specs.size(), std::vector<double>(static_cast<std::size_t>(config.replicates), 0.0));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < config.replicates; r = next++) {
            const auto ri = static_cast<std::size_t>(r);
            const std::uint64_t seed = replicate_seed(config.seed, r);
            for (Index q : config.q_grid) {
                SimConfig sc{config.family, config.m, q, config.sigma_eps, seed, config.scheme,
                             config.gamma_margin, config.offset};
                std::optional<SimTruth> truth;
                std::optional<Panel> panel;
                std::string gen_error;
                try {
                    truth = simulate::generate(sc);
                    panel = simulate::to_panel(*truth);
                } catch (const Error& e) {
                    gen_error = std::string(e.error_class()) + ": " + e.what();
                }
                for (std::size_t c = 0; c < specs.size(); ++c) {
                    if (specs[c].q != q) continue;
                    if (!truth) {
                        cells[c].errors[ri] = gen_error;
                        continue;
                    }
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        cells[c].replicates[ri] = evaluate(specs[c], *truth, *panel, config);
                    } catch (const Error& e) {
                        cells[c].errors[ri] = std::string(e.error_class()) + ": " + e.what();
                    }
                    seconds[c][ri] = std::chrono::duration<double>(
                                         std::chrono::steady_clock::now() - start)
                                         .count();
                }
            }
        }
    };

    const int jobs = std::max(1, std::min(config.jobs, config.replicates));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t c = 0; c < specs.size(); ++c) {
        double total = 0.0;
        for (double s : seconds[c]) total += s;
        cells[c].seconds = total;
        std::erase(cells[c].errors, std::string{});
    }
    return cells;
}

}  // namespace benchmark
}  // namespace sglm
