#include "sglm/inference.hpp"

#include <cmath>
#include <string>

namespace sglm::inference {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check(const GlmFit& fit, const Design& design) {
    if (design.rows() != fit.n_obs() || design.cols() != fit.n_coef())
        throw AlignmentError("design does not match fit");
}

MatrixXd checked_inverse(const MatrixXd& a) {
    Eigen::LDLT<MatrixXd> ldlt(a);
    const double scale = a.diagonal().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale)
        throw SingularDesignError("expected Hessian is singular");
    return ldlt.solve(MatrixXd::Identity(a.rows(), a.cols()));
}

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

SandwichCovariance sandwich(const GlmFit& fit, const Design& design, const VectorXd& y) {
    check(fit, design);
    if (y.size() != fit.n_obs()) throw AlignmentError("response length does not match fit");
    const auto m = static_cast<double>(fit.n_obs());
    const MatrixXd& x = design.x();

    const VectorXd resid = y - fit.mu;
    const MatrixXd wx = fit.fisher_diag.cwiseSqrt().asDiagonal() * x;
    const MatrixXd sx = resid.asDiagonal() * x;

    SandwichCovariance out;
    out.n_obs = fit.n_obs();
    out.a_bar = symmetrize(wx.transpose() * wx / m);
    out.b_bar = symmetrize(sx.transpose() * sx / m);
    const MatrixXd a_inv = checked_inverse(out.a_bar);
    out.c = symmetrize(a_inv * out.b_bar * a_inv);
    out.standard_errors = (out.c.diagonal() / m).cwiseSqrt();
    return out;
}

MatrixXd inverse_fisher(const GlmFit& fit, const Design& design) {
    check(fit, design);
    const MatrixXd wx = fit.fisher_diag.cwiseSqrt().asDiagonal() * design.x();
    return symmetrize(checked_inverse(wx.transpose() * wx / static_cast<double>(fit.n_obs())));
}

double relative_efficiency(const SandwichCovariance& direct, const SandwichCovariance& sglm,
                           Eigen::Index coef_index) {
    if (coef_index < 0 || coef_index >= direct.standard_errors.size() ||
        coef_index >= sglm.standard_errors.size())
        throw AlignmentError("coefficient index " + std::to_string(coef_index) + " out of range");
    const double vd = direct.standard_errors[coef_index] * direct.standard_errors[coef_index];
    const double vs = sglm.standard_errors[coef_index] * sglm.standard_errors[coef_index];
    return vd / vs;
}

}  // namespace sglm::inference
