#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "sglm/expfam.hpp"
#include "sglm/sibling.hpp"

namespace sglm {

// How the per-series coefficients are drawn. Defaults: w_x ~ U[0.5, 1.5],
// w_n ~ U[-1, 1]. The fixed_* overrides pin every series to one value.
struct CoefficientScheme {
    double wx_low = 0.5;
    double wx_high = 1.5;
    double wn_low = -1.0;
    double wn_high = 1.0;
    std::optional<double> fixed_wx;
    std::optional<double> fixed_wn;
};

struct SimConfig {
    Family family = Family::poisson();
    Eigen::Index m = 120;
    Eigen::Index q = 20;
    double sigma_eps = 0.1;
    std::uint64_t seed = 0;
    CoefficientScheme scheme;
    double gamma_margin = 0.5;  // Gamma: theta shifted by -(3 + margin)
    std::optional<double> offset;  // overrides the family default (0, Gamma -(3 + margin))
};

/// Ground truth of one synthetic panel:
/// theta(i, j) = offset + w_x[j] x[i] + w_n[j] noise[i] + eps(i, j), y ~ D(theta).
/// offset is zero except for Gamma, where it keeps theta negative.
struct SimTruth {
    Family family = Family::poisson();
    Eigen::VectorXd x;
    Eigen::VectorXd noise;
    Eigen::VectorXd w_x;
    Eigen::VectorXd w_n;
    Eigen::MatrixXd eps;
    Eigen::MatrixXd z;      // w_x[j] * x[i]
    Eigen::MatrixXd theta;
    Eigen::MatrixXd y;
    double offset = 0.0;

    Eigen::Index n_obs() const noexcept { return x.size(); }
    Eigen::Index n_series() const noexcept { return y.cols(); }

    // offset + z: what a design-only linear predictor [1, x] beta estimates.
    Eigen::VectorXd signal(Eigen::Index series) const;
};

struct MetricsRecord {
    double mse = 0.0;
    std::optional<double> bias;        // (w_x_hat - w_x) / w_x
    std::optional<double> noise_corr;  // Pearson(noise_hat, noise)
};

namespace simulate {

/// Per-series draws come from child streams keyed by the series index, so
/// changing q leaves the first min(q, q') series unchanged.
SimTruth generate(const SimConfig& config);

// Design [1, x] with every series as a response, target 0.
Panel to_panel(const SimTruth& truth, Eigen::Index target = 0);

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

MetricsRecord metrics(const SimTruth& truth, const Eigen::VectorXd& z_hat,
                      std::optional<double> w_x_hat = std::nullopt,
                      const std::optional<Eigen::VectorXd>& noise_hat = std::nullopt,
                      Eigen::Index target = 0);
MetricsRecord metrics(const SimTruth& truth, const GlmFit& fit, Eigen::Index target = 0);
MetricsRecord metrics(const SimTruth& truth, const SglmResult& result, Eigen::Index target = 0);

}  // namespace simulate
}  // namespace sglm
