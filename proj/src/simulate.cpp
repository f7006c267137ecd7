#include "sglm/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sglm/rng.hpp"

namespace sglm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXd SimTruth::signal(Index series) const {
    return z.col(series).array() + offset;
}

namespace simulate {

namespace {

enum Stream : std::uint64_t { kX = 0, kNoise = 1, kWx = 2, kWn = 3, kEps = 4, kY = 5 };

VectorXd uniform_vector(Index n, double lo, double hi, Rng rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

double draw_coefficient(std::uint64_t seed, Stream stream, Index series,
                        const std::optional<double>& fixed, double lo, double hi) {
    if (fixed) return *fixed;
    Rng rng = child_rng(seed, {stream, static_cast<std::uint64_t>(series)});
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void validate(const SimConfig& c) {
    if (c.m < 2) throw ConfigError("m must be at least 2");
    if (c.q < 2) throw ConfigError("q must be at least 2 (target plus one auxiliary series)");
    if (!(c.sigma_eps >= 0.0)) throw ConfigError("sigma_eps must be non-negative");
    if (c.scheme.wx_low > c.scheme.wx_high || c.scheme.wn_low > c.scheme.wn_high)
        throw ConfigError("coefficient ranges must have low <= high");
}

}  // namespace

SimTruth generate(const SimConfig& config) {
    validate(config);
    const Index m = config.m;
    const Index q = config.q;
    const auto& scheme = config.scheme;

    SimTruth t;
    t.family = config.family;
    t.x = uniform_vector(m, -1.0, 1.0, child_rng(config.seed, {kX}));
    t.noise = uniform_vector(m, -1.0, 1.0, child_rng(config.seed, {kNoise}));
    t.w_x.resize(q);
    t.w_n.resize(q);
    for (Index j = 0; j < q; ++j) {
        t.w_x[j] = draw_coefficient(config.seed, kWx, j, scheme.fixed_wx, scheme.wx_low,
                                    scheme.wx_high);
        t.w_n[j] = draw_coefficient(config.seed, kWn, j, scheme.fixed_wn, scheme.wn_low,
                                    scheme.wn_high);
    }
    t.offset = config.offset ? *config.offset
               : config.family.kind() == FamilyKind::Gamma ? -(3.0 + config.gamma_margin)
                                                           : 0.0;

    t.eps.resize(m, q);
    t.z.resize(m, q);
    t.theta.resize(m, q);
    t.y.resize(m, q);
    for (Index j = 0; j < q; ++j) {
        Rng eps_rng = child_rng(config.seed, {kEps, static_cast<std::uint64_t>(j)});
        Rng y_rng = child_rng(config.seed, {kY, static_cast<std::uint64_t>(j)});
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index i = 0; i < m; ++i) {
            t.eps(i, j) = config.sigma_eps * normal(eps_rng);
            t.z(i, j) = t.w_x[j] * t.x[i];
            t.theta(i, j) = t.offset + t.z(i, j) + t.w_n[j] * t.noise[i] + t.eps(i, j);
            if (!config.family.in_domain(t.theta(i, j)))
                throw GenerationError("natural parameter " + std::to_string(t.theta(i, j)) +
                                      " at row " + std::to_string(i) + ", series " +
                                      std::to_string(j) + " outside " +
                                      std::string(config.family.name()) +
                                      " domain (offset " + std::to_string(t.offset) + ")");
            t.y(i, j) = expfam::sample(config.family, NaturalParam(config.family, t.theta(i, j)),
                                       y_rng);
        }
    }
    return t;
}

Panel to_panel(const SimTruth& truth, Index target) {
    return Panel(Design::with_intercept(truth.x, {"x"}), truth.y, target, truth.family);
}

double pearson(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2) throw AlignmentError("pearson: length mismatch");
    const VectorXd da = a.array() - a.mean();
    const VectorXd db = b.array() - b.mean();
    const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (denom == 0.0) return 0.0;
    return da.dot(db) / denom;
}

MetricsRecord metrics(const SimTruth& truth, const VectorXd& z_hat, std::optional<double> w_x_hat,
                      const std::optional<VectorXd>& noise_hat, Index target) {
    if (target < 0 || target >= truth.n_series()) throw AlignmentError("target out of range");
    if (z_hat.size() != truth.n_obs()) throw AlignmentError("z_hat length mismatch");
    MetricsRecord out;
    out.mse = (z_hat - truth.signal(target)).squaredNorm() / static_cast<double>(z_hat.size());
    if (w_x_hat) out.bias = (*w_x_hat - truth.w_x[target]) / truth.w_x[target];
    if (noise_hat) {
        if (noise_hat->size() != truth.n_obs()) throw AlignmentError("noise_hat length mismatch");
        out.noise_corr = pearson(*noise_hat, truth.noise);
    }
    return out;
}

MetricsRecord metrics(const SimTruth& truth, const GlmFit& fit, Index target) {
    if (fit.n_coef() < 2) throw AlignmentError("fit lacks the x coefficient");
    return metrics(truth, fit.eta, fit.beta[1], std::nullopt, target);
}

MetricsRecord metrics(const SimTruth& truth, const SglmResult& result, Index target) {
    return metrics(truth, result.z_hat, result.refit.beta[1], result.noise_hat, target);
}

}  // namespace simulate
}  // namespace sglm
