#include "sglm/residuals.hpp"

#include <cmath>
#include <string>

namespace sglm {

std::string_view residual_kind_name(ResidualKind kind) noexcept {
    switch (kind) {
    case ResidualKind::Raw: return "raw";
    case ResidualKind::Student: return "student";
    case ResidualKind::Deviance: return "deviance";
    case ResidualKind::FisherScaled: return "fisher";
    }
    return "unknown";
}

ResidualKind parse_residual_kind(std::string_view name) {
    if (name == "raw") return ResidualKind::Raw;
    if (name == "student" || name == "studentized") return ResidualKind::Student;
    if (name == "deviance") return ResidualKind::Deviance;
    if (name == "fisher" || name == "fisher_scaled") return ResidualKind::FisherScaled;
    throw ConfigError("unknown residual kind '" + std::string(name) + "'");
}

namespace residuals {

namespace {

void check_aligned(const GlmFit& fit, const Eigen::VectorXd& y) {
    if (y.size() != fit.n_obs())
        throw AlignmentError("response length " + std::to_string(y.size()) +
                             " does not match fit with " + std::to_string(fit.n_obs()) +
                             " observations");
}

}  // namespace

ResidualVector fisher_scaled(const GlmFit& fit, const Eigen::VectorXd& y) {
    check_aligned(fit, y);
    return {ResidualKind::FisherScaled, (y - fit.mu).cwiseQuotient(fit.fisher_diag), &fit};
}

ResidualVector raw(const GlmFit& fit, const Eigen::VectorXd& y) {
    check_aligned(fit, y);
    return {ResidualKind::Raw, y - fit.mu, &fit};
}

ResidualVector studentized(const GlmFit& fit, const Design& design, const Eigen::VectorXd& y,
                           SaturatedPolicy policy) {
    check_aligned(fit, y);
    const Eigen::VectorXd h = glm::hat_diagonal(fit, design);
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (h[i] >= 1.0 - 1e-12) {
            if (policy == SaturatedPolicy::Zero) {
                out[i] = 0.0;
                continue;
            }
            throw LeverageError("observation " + std::to_string(i) +
                                " has leverage 1; studentized residual undefined");
        }
        const double var = expfam::variance(fit.family, NaturalParam(fit.family, fit.eta[i]));
        out[i] = (y[i] - fit.mu[i]) / std::sqrt(var * (1.0 - h[i]));
    }
    return {ResidualKind::Student, std::move(out), &fit};
}

ResidualVector deviance_residual(const GlmFit& fit, const Eigen::VectorXd& y) {
    check_aligned(fit, y);
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double diff = y[i] - fit.mu[i];
        const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        out[i] = sign * std::sqrt(expfam::unit_deviance(fit.family, y[i], fit.mu[i]));
    }
    return {ResidualKind::Deviance, std::move(out), &fit};
}

ResidualVector compute(ResidualKind kind, const GlmFit& fit, const Design& design,
                       const Eigen::VectorXd& y, SaturatedPolicy policy) {
    switch (kind) {
    case ResidualKind::Raw: return raw(fit, y);
    case ResidualKind::Student: return studentized(fit, design, y, policy);
    case ResidualKind::Deviance: return deviance_residual(fit, y);
    case ResidualKind::FisherScaled: return fisher_scaled(fit, y);
    }
    throw ConfigError("unknown residual kind");
}

}  // namespace residuals
}  // namespace sglm
