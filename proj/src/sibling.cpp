#include "sglm/sibling.hpp"

#include <string>

namespace sglm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Panel::Panel(Design design, MatrixXd responses, Index target_index, Family family)
    : design_(std::move(design)), responses_(std::move(responses)), target_(target_index),
      family_(family) {
    if (responses_.rows() != design_.rows())
        throw AlignmentError("panel responses have " + std::to_string(responses_.rows()) +
                             " rows, design has " + std::to_string(design_.rows()));
    if (responses_.cols() < 2)
        throw ConfigError("panel needs at least two series (one target, one auxiliary)");
    if (target_ < 0 || target_ >= responses_.cols())
        throw ConfigError("target index out of range");
    for (Index j = 0; j < responses_.cols(); ++j)
        for (Index i = 0; i < responses_.rows(); ++i)
            if (!family_.in_support(responses_(i, j)))
                throw DomainError("series " + std::to_string(j) + " row " + std::to_string(i) +
                                  ": value outside " + std::string(family_.name()) + " support");
}

MatrixXd Panel::auxiliaries() const {
    MatrixXd out(n_obs(), n_series() - 1);
    Index k = 0;
    for (Index j = 0; j < n_series(); ++j)
        if (j != target_) out.col(k++) = responses_.col(j);
    return out;
}

std::string_view noise_strategy_name(NoiseStrategy s) noexcept {
    return s == NoiseStrategy::Regression ? "regression" : "mean_of_residuals";
}

NoiseStrategy parse_noise_strategy(std::string_view name) {
    if (name == "regression") return NoiseStrategy::Regression;
    if (name == "mean_of_residuals" || name == "mean") return NoiseStrategy::MeanOfResiduals;
    throw ConfigError("unknown noise strategy '" + std::string(name) + "'");
}

namespace sibling {

namespace {

MatrixXd hstack(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

MatrixXd baseline_predictors(const std::optional<MatrixXd>& x, Index m) {
    return glm::ensure_intercept(x ? *x : MatrixXd(m, 0));
}

double r_squared(const VectorXd& y, const VectorXd& fitted) {
    const double ss_tot = (y.array() - y.mean()).square().sum();
    if (ss_tot == 0.0) return 0.0;
    return 1.0 - (y - fitted).squaredNorm() / ss_tot;
}

void check_rows(const VectorXd& y1, const MatrixXd& other, const char* what) {
    if (other.rows() != y1.size())
        throw AlignmentError(std::string(what) + " has " + std::to_string(other.rows()) +
                             " rows, y1 has " + std::to_string(y1.size()));
}

}  // namespace

VectorXd half_sibling(const VectorXd& y1, const MatrixXd& y2) {
    check_rows(y1, y2, "y2");
    const VectorXd fitted = glm::project(glm::ensure_intercept(y2), y1);
    return (y1 - fitted).array() + y1.mean();
}

VectorXd three_quarter_sibling(const MatrixXd& x, const VectorXd& y1, const MatrixXd& y2) {
    check_rows(y1, x, "x");
    check_rows(y1, y2, "y2");
    const MatrixXd base = glm::ensure_intercept(x);
    return y1 - glm::project(hstack(base, y2), y1) + glm::project(base, y1);
}

std::pair<VectorXd, VectorXd> residual_form_equivalence(const VectorXd& y1, const MatrixXd& y2,
                                                        const std::optional<MatrixXd>& x) {
    check_rows(y1, y2, "y2");
    VectorXd direct = x ? three_quarter_sibling(*x, y1, y2) : half_sibling(y1, y2);

    const MatrixXd base = baseline_predictors(x, y1.size());
    const VectorXd r1 = y1 - glm::project(base, y1);
    MatrixXd r2(y2.rows(), y2.cols());
    for (Index j = 0; j < y2.cols(); ++j) r2.col(j) = y2.col(j) - glm::project(base, y2.col(j));
    VectorXd via_residuals = y1 - glm::project(glm::ensure_intercept(r2), r1);
    return {std::move(direct), std::move(via_residuals)};
}

NoiseEstimate estimate_noise(const Panel& panel, const NoiseOptions& options) {
    const Index m = panel.n_obs();
    const Index q = panel.n_series();
    const Design& design = panel.design();

    NoiseEstimate out;
    out.series_fits.reserve(static_cast<std::size_t>(q));
    out.residuals.resize(m, q);
    for (Index j = 0; j < q; ++j) {
        const VectorXd y = panel.responses().col(j);
        try {
            out.series_fits.push_back(glm::fit(design, y, panel.family(), options.fit));
        } catch (const Error& e) {
            throw SeriesFitError(static_cast<std::size_t>(j), e.error_class(), e.what());
        }
        out.residuals.col(j) =
            residuals::compute(options.residual_kind, out.series_fits.back(), design, y).values;
    }

    const MatrixXd base = options.include_x_in_step3 ? glm::ensure_intercept(design.x())
                                                     : MatrixXd::Ones(m, 1);
    MatrixXd aux(m, q - 1);
    for (Index j = 0, k = 0; j < q; ++j)
        if (j != panel.target_index()) aux.col(k++) = out.residuals.col(j);

    const VectorXd r1 = out.residuals.col(panel.target_index());
    if (options.strategy == NoiseStrategy::Regression) {
        const VectorXd full_fit = glm::ols_fitted(hstack(base, aux), r1, options.fit.rank_tol);
        const VectorXd base_fit = glm::ols_fitted(base, r1, options.fit.rank_tol);
        out.noise_hat = full_fit - base_fit;
        out.r2_step3 = r_squared(r1, full_fit);
        out.r2_baseline = r_squared(r1, base_fit);
    } else {
        const VectorXd avg = aux.rowwise().mean();
        const VectorXd base_fit = glm::ols_fitted(base, avg, options.fit.rank_tol);
        out.noise_hat = avg - base_fit;
        out.r2_step3 = r_squared(r1, glm::ols_fitted(hstack(base, avg), r1, options.fit.rank_tol));
        out.r2_baseline = r_squared(r1, glm::ols_fitted(base, r1, options.fit.rank_tol));
    }
    return out;
}

SglmResult sglm_denoise(const Panel& panel, const SglmOptions& options) {
    const Design& design = panel.design();
    const VectorXd y1 = panel.target();
    const auto& noise_opts = options.noise;

    VectorXd noise_hat;
    std::optional<GlmFit> base_fit;
    SglmDiagnostics diag{noise_opts.residual_kind, noise_opts.strategy,
                         noise_opts.include_x_in_step3, 0.0, 0.0};
    if (options.noise_override) {
        if (options.noise_override->size() != panel.n_obs())
            throw AlignmentError("noise override length does not match panel");
        noise_hat = *options.noise_override;
        try {
            base_fit = glm::fit(design, y1, panel.family(), noise_opts.fit);
        } catch (const Error& e) {
            throw SeriesFitError(static_cast<std::size_t>(panel.target_index()),
                                 e.error_class(), e.what());
        }
    } else {
        NoiseEstimate est = estimate_noise(panel, noise_opts);
        noise_hat = std::move(est.noise_hat);
        base_fit = std::move(est.series_fits[static_cast<std::size_t>(panel.target_index())]);
        diag.r2_step3 = est.r2_step3;
        diag.r2_baseline = est.r2_baseline;
    }

    const Design augmented = design.append_column(noise_hat, "noise_hat");
    GlmFit refit = [&] {
        try {
            return glm::fit(augmented, y1, panel.family(), noise_opts.fit);
        } catch (const Error& e) {
            throw SeriesFitError(static_cast<std::size_t>(panel.target_index()),
                                 e.error_class(), std::string("refit: ") + e.what());
        }
    }();
    VectorXd z_hat = design.x() * refit.beta.head(design.cols());
    return {std::move(noise_hat), std::move(*base_fit), std::move(refit), std::move(z_hat), diag};
}

}  // namespace sibling
}  // namespace sglm
