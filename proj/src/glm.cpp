#include "sglm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace sglm {

Design::Design(Eigen::MatrixXd x, std::vector<std::string> column_names)
    : x_(std::move(x)), names_(std::move(column_names)) {
    if (x_.cols() < 1) throw AlignmentError("design needs at least one column");
    if (x_.rows() < x_.cols())
        throw SingularDesignError("design has fewer rows (" + std::to_string(x_.rows()) +
                                  ") than columns (" + std::to_string(x_.cols()) + ")");
    if (!x_.allFinite()) throw DomainError("design contains non-finite entries");
    if (static_cast<Eigen::Index>(names_.size()) != x_.cols())
        throw AlignmentError("column name count does not match design width");
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) throw AlignmentError("design column names must be unique");
}

Design::Design(Eigen::MatrixXd x) : Design(x, [&] {
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("c" + std::to_string(j));
    return names;
}()) {}

Design Design::with_intercept(const Eigen::MatrixXd& covariates,
                              std::vector<std::string> covariate_names) {
    if (covariate_names.empty())
        for (Eigen::Index j = 0; j < covariates.cols(); ++j)
            covariate_names.push_back("x" + std::to_string(j));
    Eigen::MatrixXd x(covariates.rows(), covariates.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(covariates.cols()) = covariates;
    covariate_names.insert(covariate_names.begin(), "(intercept)");
    return Design(std::move(x), std::move(covariate_names));
}

Design Design::append_column(const Eigen::VectorXd& column, std::string name) const {
    if (column.size() != rows()) throw AlignmentError("appended column length mismatch");
    Eigen::MatrixXd x(rows(), cols() + 1);
    x.leftCols(cols()) = x_;
    x.col(cols()) = column;
    auto names = names_;
    names.push_back(std::move(name));
    return Design(std::move(x), std::move(names));
}

namespace glm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::ColPivHouseholderQR<MatrixXd> checked_qr(const MatrixXd& x, double rank_tol) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    qr.setThreshold(rank_tol);
    if (qr.rank() < x.cols())
        throw SingularDesignError("design is rank deficient (rank " + std::to_string(qr.rank()) +
                                  " < " + std::to_string(x.cols()) + ")");
    return qr;
}

void check_response(const VectorXd& y, Index m, const Family& family) {
    if (y.size() != m)
        throw AlignmentError("response length " + std::to_string(y.size()) +
                             " does not match design rows " + std::to_string(m));
    for (Index i = 0; i < m; ++i)
        if (!family.in_support(y[i]))
            throw DomainError("response " + std::to_string(y[i]) + " at row " +
                              std::to_string(i) + " outside " + std::string(family.name()) +
                              " support");
}

bool eta_in_domain(const VectorXd& eta, const Family& family) {
    for (Index i = 0; i < eta.size(); ++i)
        if (!family.in_domain(eta[i])) return false;
    return true;
}

double loglik_at(const VectorXd& eta, const VectorXd& y, const Family& family) {
    double ll = 0.0;
    for (Index i = 0; i < eta.size(); ++i)
        ll += expfam::log_density(family, y[i], NaturalParam(family, eta[i]));
    return ll;
}

GlmFit make_fit(const Family& family, VectorXd beta, VectorXd eta, const VectorXd& y) {
    const Index m = eta.size();
    VectorXd mu(m), info(m);
    for (Index i = 0; i < m; ++i) {
        const NaturalParam t(family, eta[i]);
        mu[i] = expfam::mean(family, t);
        info[i] = expfam::fisher_info(family, t);
    }
    GlmFit out{family, std::move(beta), std::move(eta), std::move(mu), std::move(info), 0.0, false, 0, {}};
    out.loglik = loglik_at(out.eta, y, family);
    return out;
}

VectorXd initial_beta(const MatrixXd& x, const VectorXd& y, const Family& family,
                      double rank_tol) {
    if (family.kind() != FamilyKind::Gamma) return VectorXd::Zero(x.cols());
    const double ybar = y.mean();
    VectorXd eta0(y.size());
    for (Index i = 0; i < y.size(); ++i)
        eta0[i] = expfam::natural_from_mean(family, 0.5 * (y[i] + ybar));
    VectorXd beta = ols(x, eta0, rank_tol);
    if (!eta_in_domain(x * beta, family))
        throw DomainError("no feasible gamma starting point: least-squares start leaves the "
                          "negative natural-parameter domain");
    return beta;
}

}  // namespace

GlmFit fit(const Design& design, const VectorXd& y, const Family& family,
           const FitOptions& options) {
    const MatrixXd& x = design.x();
    const Index m = x.rows();
    check_response(y, m, family);
    checked_qr(x, options.rank_tol);

    VectorXd beta = initial_beta(x, y, family, options.rank_tol);
    VectorXd eta = x * beta;
    if (!eta_in_domain(eta, family)) throw DomainError("initial linear predictor outside domain");
    GlmFit current = make_fit(family, beta, eta, y);
    std::vector<double> trace{current.loglik};

    const double score_limit = static_cast<double>(m) * options.tol_score;
    bool stalled = false;
    double last_step = 0.0;  // inf-norm of the last accepted coefficient change
    for (int iter = 0; iter <= options.max_iters; ++iter) {
        const VectorXd resid = y - current.mu;
        const double score_norm = (x.transpose() * resid).lpNorm<Eigen::Infinity>();
        // a small score with coefficients still moving is saturation (separation), not an optimum
        const bool settled = last_step <= 1e-4 * (1.0 + current.beta.lpNorm<Eigen::Infinity>());
        if (score_norm <= score_limit && settled) {
            current.converged = true;
            current.iterations = iter;
            current.loglik_trace = std::move(trace);
            return current;
        }
        if (iter == options.max_iters) break;

        const VectorXd w = current.fisher_diag.cwiseMax(std::numeric_limits<double>::min());
        const VectorXd sw = w.cwiseSqrt();
        const VectorXd z = current.eta + resid.cwiseQuotient(w);
        const MatrixXd wx = sw.asDiagonal() * x;
        const VectorXd target = sw.cwiseProduct(z);
        VectorXd step;
        try {
            step = checked_qr(wx, options.rank_tol).solve(target) - current.beta;
        } catch (const SingularDesignError&) {
            // X itself has full rank, so the weights have collapsed: fitted means at the boundary
            throw NonConvergenceError("IRLS weights degenerate at iteration " + std::to_string(iter),
                                      current.beta, iter);
        }

        bool accepted = false;
        double scale = 1.0;
        for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
            VectorXd cand_beta = current.beta + scale * step;
            VectorXd cand_eta = x * cand_beta;
            if (!cand_beta.allFinite() || !eta_in_domain(cand_eta, family)) continue;
            GlmFit cand = make_fit(family, std::move(cand_beta), std::move(cand_eta), y);
            // allow rounding-level decreases so near-optimal Newton steps go through
            const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(std::abs(current.loglik), 1.0);
            if (!std::isfinite(cand.loglik) || cand.loglik < current.loglik - slack) continue;
            const double rel = std::abs(cand.loglik - current.loglik) /
                               std::max(std::abs(current.loglik), 1.0);
            stalled = rel < options.tol_rel_loglik;
            last_step = (cand.beta - current.beta).lpNorm<Eigen::Infinity>();
            current = std::move(cand);
            trace.push_back(current.loglik);
            accepted = true;
            break;
        }
        if (!accepted) {
            // Step halving exhausted: at the floating-point optimum when the
            // previous accepted step no longer changed the likelihood.
            if (stalled) {
                current.converged = true;
                current.iterations = iter;
                current.loglik_trace = std::move(trace);
                return current;
            }
            throw NonConvergenceError("step halving exhausted at iteration " +
                                          std::to_string(iter),
                                      current.beta, iter);
        }
    }
    throw NonConvergenceError("no convergence after " + std::to_string(options.max_iters) +
                                  " iterations",
                              current.beta, options.max_iters);
}

GlmFit evaluate(const Design& design, const VectorXd& y, const Family& family,
                const VectorXd& beta) {
    if (beta.size() != design.cols()) throw AlignmentError("beta length does not match design");
    check_response(y, design.rows(), family);
    VectorXd eta = design.x() * beta;
    if (!eta_in_domain(eta, family)) throw DomainError("linear predictor outside domain");
    return make_fit(family, beta, std::move(eta), y);
}

Prediction predict(const GlmFit& fit, const MatrixXd& x) {
    if (x.cols() != fit.beta.size())
        throw AlignmentError("design has " + std::to_string(x.cols()) +
                             " columns, fit expects " + std::to_string(fit.beta.size()));
    Prediction out{x * fit.beta, VectorXd(x.rows())};
    for (Index i = 0; i < x.rows(); ++i)
        out.mu[i] = expfam::mean(fit.family, NaturalParam(fit.family, out.eta[i]));
    return out;
}

VectorXd hat_diagonal(const GlmFit& fit, const Design& design) {
    const MatrixXd& x = design.x();
    if (x.rows() != fit.n_obs() || x.cols() != fit.n_coef())
        throw AlignmentError("design does not match fit");
    const MatrixXd wx = fit.fisher_diag.cwiseSqrt().asDiagonal() * x;
    const auto qr = checked_qr(wx, 1e-10);
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(x.rows(), x.cols());
    return q.rowwise().squaredNorm();
}

double log_likelihood(const GlmFit& fit, const VectorXd& y) {
    if (y.size() != fit.n_obs()) throw AlignmentError("response length does not match fit");
    return loglik_at(fit.eta, y, fit.family);
}

VectorXd score(const GlmFit& fit, const Design& design, const VectorXd& y) {
    if (y.size() != fit.n_obs() || design.rows() != fit.n_obs())
        throw AlignmentError("response/design do not match fit");
    return design.x().transpose() * (y - fit.mu);
}

VectorXd ols(const MatrixXd& x, const VectorXd& y, double rank_tol) {
    if (y.size() != x.rows()) throw AlignmentError("ols: length mismatch");
    if (x.rows() < x.cols()) throw SingularDesignError("ols: fewer rows than columns");
    return checked_qr(x, rank_tol).solve(y);
}

VectorXd ols_fitted(const MatrixXd& x, const VectorXd& y, double rank_tol) {
    return x * ols(x, y, rank_tol);
}

VectorXd project(const MatrixXd& x, const VectorXd& y, double rank_tol) {
    if (y.size() != x.rows()) throw AlignmentError("project: length mismatch");
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    qr.setThreshold(rank_tol);
    const Index r = qr.rank();
    if (r == 0) throw SingularDesignError("project: design has rank 0");
    VectorXd coords = qr.householderQ().adjoint() * y;
    coords.tail(coords.size() - r).setZero();
    return qr.householderQ() * coords;
}

bool has_constant_column(const MatrixXd& x) {
    for (Index j = 0; j < x.cols(); ++j) {
        const double first = x(0, j);
        if (first != 0.0 && (x.col(j).array() == first).all()) return true;
    }
    return false;
}

MatrixXd ensure_intercept(const MatrixXd& x) {
    if (x.rows() > 0 && has_constant_column(x)) return x;
    MatrixXd out(x.rows(), x.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(x.cols()) = x;
    return out;
}

}  // namespace glm
}  // namespace sglm
