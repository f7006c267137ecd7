#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "sglm/glm.hpp"

namespace sglm {

enum class ResidualKind { Raw, Student, Deviance, FisherScaled };

std::string_view residual_kind_name(ResidualKind kind) noexcept;
ResidualKind parse_residual_kind(std::string_view name);

struct ResidualVector {
    ResidualKind kind;
    Eigen::VectorXd values;
    const GlmFit* source_fit = nullptr;  // non-owning
};

namespace residuals {

// What studentized() does at a point whose leverage is (numerically) one.
enum class SaturatedPolicy { Error, Zero };

/// (y - mu) / A''(eta): the residual scaled by the inverse per-observation
/// Fisher information. To first order its conditional mean is the gap
/// between the true natural parameter and the fitted linear predictor.
ResidualVector fisher_scaled(const GlmFit& fit, const Eigen::VectorXd& y);

ResidualVector raw(const GlmFit& fit, const Eigen::VectorXd& y);

// (y - mu) / sqrt(V(mu) (1 - h)), h the hat-matrix diagonal at the fitted weights.
ResidualVector studentized(const GlmFit& fit, const Design& design, const Eigen::VectorXd& y,
                           SaturatedPolicy policy = SaturatedPolicy::Error);

// sign(y - mu) * sqrt(unit deviance), with sign(0) = 0.
ResidualVector deviance_residual(const GlmFit& fit, const Eigen::VectorXd& y);

ResidualVector compute(ResidualKind kind, const GlmFit& fit, const Design& design,
                       const Eigen::VectorXd& y,
                       SaturatedPolicy policy = SaturatedPolicy::Error);

}  // namespace residuals
}  // namespace sglm
