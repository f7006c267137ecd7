#pragma once

#include <Eigen/Dense>

#include "sglm/glm.hpp"

namespace sglm {

/// Huber-White covariance of sqrt(m)(beta_hat - beta*):
/// C = A^{-1} B A^{-1} with A = (1/m) sum A''(eta_i) x_i x_i',
/// B = (1/m) sum (y_i - mu_i)^2 x_i x_i'. No small-sample correction.
struct SandwichCovariance {
    Eigen::MatrixXd a_bar;
    Eigen::MatrixXd b_bar;
    Eigen::MatrixXd c;
    Eigen::VectorXd standard_errors;  // sqrt(diag(C) / m)
    Eigen::Index n_obs = 0;
};

namespace inference {

SandwichCovariance sandwich(const GlmFit& fit, const Design& design, const Eigen::VectorXd& y);

// Model-based (inverse Fisher) counterpart: (1/m X'WX)^{-1}.
Eigen::MatrixXd inverse_fisher(const GlmFit& fit, const Design& design);

// Var_direct / Var_sglm for one coefficient; > 1 favours the SGLM refit.
double relative_efficiency(const SandwichCovariance& direct, const SandwichCovariance& sglm,
                           Eigen::Index coef_index);

}  // namespace inference
}  // namespace sglm
