#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sglm/expfam.hpp"

namespace sglm {

/// Covariate matrix (m observations x p columns) with unique column names.
/// Construction rejects m < p, non-finite entries and duplicate names.
class Design {
public:
    Design(Eigen::MatrixXd x, std::vector<std::string> column_names);

    // Default names c0..c{p-1}.
    explicit Design(Eigen::MatrixXd x);

    // Prepends an "(intercept)" column of ones.
    static Design with_intercept(const Eigen::MatrixXd& covariates,
                                 std::vector<std::string> covariate_names = {});

    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const std::vector<std::string>& column_names() const noexcept { return names_; }
    Eigen::Index rows() const noexcept { return x_.rows(); }
    Eigen::Index cols() const noexcept { return x_.cols(); }

    Design append_column(const Eigen::VectorXd& column, std::string name) const;

private:
    Eigen::MatrixXd x_;
    std::vector<std::string> names_;
};

struct FitOptions {
    int max_iters = 100;
    int max_halvings = 30;
    double tol_score = 1e-8;         // per-observation scale: converged when |X'(y-mu)|_inf <= m*tol
    double tol_rel_loglik = 1e-10;
    double rank_tol = 1e-10;         // relative to the largest pivot
};

struct GlmFit {
    Family family;
    Eigen::VectorXd beta;
    Eigen::VectorXd eta;
    Eigen::VectorXd mu;
    Eigen::VectorXd fisher_diag;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> loglik_trace;  // log-likelihood after each accepted iterate

    Eigen::Index n_obs() const noexcept { return eta.size(); }
    Eigen::Index n_coef() const noexcept { return beta.size(); }
};

namespace glm {

/// Canonical-link maximum likelihood by IRLS with step halving.
///
/// Starts from beta = 0 (Gamma: a feasible least-squares start, since 0 is
/// outside its domain). Each iteration solves the weighted least-squares
/// problem through a pivoted QR of W^{1/2}X and halves the step until the
/// log-likelihood does not decrease and every eta stays in domain.
///
/// Throws SingularDesignError on a rank-deficient design, DomainError for
/// responses outside the family support, NonConvergenceError (with the last
/// iterate) when iterations or halvings are exhausted.
GlmFit fit(const Design& design, const Eigen::VectorXd& y, const Family& family,
           const FitOptions& options = {});

// Builds a GlmFit at a given beta without optimising (converged = false).
GlmFit evaluate(const Design& design, const Eigen::VectorXd& y, const Family& family,
                const Eigen::VectorXd& beta);

struct Prediction {
    Eigen::VectorXd eta;
    Eigen::VectorXd mu;
};

Prediction predict(const GlmFit& fit, const Eigen::MatrixXd& x);
inline Prediction predict(const GlmFit& fit, const Design& design) {
    return predict(fit, design.x());
}

// diag(W^{1/2} X (X'WX)^{-1} X' W^{1/2}) with W = diag(fit.fisher_diag).
Eigen::VectorXd hat_diagonal(const GlmFit& fit, const Design& design);

double log_likelihood(const GlmFit& fit, const Eigen::VectorXd& y);

Eigen::VectorXd score(const GlmFit& fit, const Design& design, const Eigen::VectorXd& y);

/// Least squares through pivoted QR; throws SingularDesignError when x is
/// not of full column rank.
Eigen::VectorXd ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double rank_tol = 1e-10);

// Fitted values of the least-squares regression of y on x.
Eigen::VectorXd ols_fitted(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double rank_tol = 1e-10);

// Orthogonal projection of y onto the column space of x. Unlike ols_fitted
// this accepts redundant columns; only an all-zero x is rejected.
Eigen::VectorXd project(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        double rank_tol = 1e-10);

bool has_constant_column(const Eigen::MatrixXd& x);

// [1, x] unless x already carries a nonzero constant column.
Eigen::MatrixXd ensure_intercept(const Eigen::MatrixXd& x);

}  // namespace glm
}  // namespace sglm
