#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sglm/glm.hpp"
#include "sglm/residuals.hpp"

namespace sglm {

/// Shared covariates X and q >= 2 aligned response series, one of which is
/// the denoising target; the rest are auxiliary siblings.
class Panel {
public:
    Panel(Design design, Eigen::MatrixXd responses, Eigen::Index target_index, Family family);

    const Design& design() const noexcept { return design_; }
    const Eigen::MatrixXd& responses() const noexcept { return responses_; }
    Eigen::Index target_index() const noexcept { return target_; }
    const Family& family() const noexcept { return family_; }

    Eigen::Index n_obs() const noexcept { return responses_.rows(); }
    Eigen::Index n_series() const noexcept { return responses_.cols(); }

    Eigen::VectorXd target() const { return responses_.col(target_); }
    // Every series except the target, in column order.
    Eigen::MatrixXd auxiliaries() const;

private:
    Design design_;
    Eigen::MatrixXd responses_;
    Eigen::Index target_;
    Family family_;
};

enum class NoiseStrategy { Regression, MeanOfResiduals };

std::string_view noise_strategy_name(NoiseStrategy s) noexcept;
NoiseStrategy parse_noise_strategy(std::string_view name);

struct NoiseOptions {
    ResidualKind residual_kind = ResidualKind::FisherScaled;
    bool include_x_in_step3 = false;
    NoiseStrategy strategy = NoiseStrategy::Regression;
    FitOptions fit;
};

struct NoiseEstimate {
    Eigen::VectorXd noise_hat;
    std::vector<GlmFit> series_fits;  // one per panel column
    Eigen::MatrixXd residuals;        // m x q, chosen kind
    double r2_step3 = 0.0;            // target residual on auxiliaries (+X)
    double r2_baseline = 0.0;         // target residual on intercept (+X)
};

struct SglmOptions {
    NoiseOptions noise;
    // Test hook: skip noise estimation and refit on this series instead.
    std::optional<Eigen::VectorXd> noise_override;
};

struct SglmDiagnostics {
    ResidualKind residual_kind;
    NoiseStrategy strategy;
    bool include_x_in_step3;
    double r2_step3;
    double r2_baseline;
};

struct SglmResult {
    Eigen::VectorXd noise_hat;
    GlmFit base_fit;
    GlmFit refit;
    Eigen::VectorXd z_hat;
    SglmDiagnostics diagnostics;
};

namespace sibling {

/// y1 - E[y1 | y2] + mean(y1) with the conditional expectation a least
/// squares regression on [1, y2]. Redundant columns in y2 are tolerated.
Eigen::VectorXd half_sibling(const Eigen::VectorXd& y1, const Eigen::MatrixXd& y2);

/// y1 - E[y1 | x, y2] + E[y1 | x], both regressions with an intercept.
Eigen::VectorXd three_quarter_sibling(const Eigen::MatrixXd& x, const Eigen::VectorXd& y1,
                                      const Eigen::MatrixXd& y2);

/// Both forms of the (half or three-quarter) sibling estimator: the direct
/// conditional-expectation form and y1 - E[R1 | R2] with R the deviations
/// from the baseline regression. They agree up to rounding.
std::pair<Eigen::VectorXd, Eigen::VectorXd> residual_form_equivalence(
    const Eigen::VectorXd& y1, const Eigen::MatrixXd& y2,
    const std::optional<Eigen::MatrixXd>& x = std::nullopt);

/// Steps 1-4 of the pipeline: per-series GLM on X, residuals of the chosen
/// kind, then the noise proxy as the difference between the step-3 fitted
/// values and the baseline (intercept, or intercept + X) fitted values.
NoiseEstimate estimate_noise(const Panel& panel, const NoiseOptions& options = {});

/// Full pipeline: estimate the noise proxy, refit the target GLM on
/// [X, noise_hat] and report the design-only linear predictor as z_hat.
SglmResult sglm_denoise(const Panel& panel, const SglmOptions& options = {});

}  // namespace sibling
}  // namespace sglm
