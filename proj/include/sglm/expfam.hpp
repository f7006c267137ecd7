#pragma once

#include <string>
#include <string_view>

#include "sglm/error.hpp"
#include "sglm/rng.hpp"

namespace sglm {

enum class FamilyKind { Gaussian, Poisson, Bernoulli, Gamma };

/// Exponential family with sufficient statistic T(y) = y.
///
/// `dispersion` is the Gaussian variance, the Gamma shape k, and exactly 1
/// for Poisson and Bernoulli. Gamma uses A(theta) = -k log(-theta) so that
/// A'(theta) is the mean for every family.
class Family {
public:
    Family(FamilyKind kind, double dispersion = 1.0);

    static Family gaussian(double variance = 1.0) { return {FamilyKind::Gaussian, variance}; }
    static Family poisson() { return {FamilyKind::Poisson, 1.0}; }
    static Family bernoulli() { return {FamilyKind::Bernoulli, 1.0}; }
    static Family gamma(double shape) { return {FamilyKind::Gamma, shape}; }

    FamilyKind kind() const noexcept { return kind_; }
    double dispersion() const noexcept { return dispersion_; }
    std::string_view name() const noexcept;

    bool in_domain(double theta) const noexcept;
    bool in_support(double y) const noexcept;
    bool valid_mean(double mu) const noexcept;

    bool operator==(const Family&) const = default;

private:
    FamilyKind kind_;
    double dispersion_;
};

/// Parses "gaussian", "poisson", "bernoulli" or "gamma" (case-insensitive).
FamilyKind parse_family_kind(std::string_view name);

/// Natural parameter checked against its family's domain at construction.
class NaturalParam {
public:
    NaturalParam(const Family& family, double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

namespace expfam {

double log_partition(const Family& family, NaturalParam theta);
double mean(const Family& family, NaturalParam theta);
double fisher_info(const Family& family, NaturalParam theta);

// Var(Y | theta). Equals dispersion * A''(theta) for Gaussian, A''(theta)
// otherwise (the Gamma shape is already inside A).
double variance(const Family& family, NaturalParam theta);

// Inverse of mean(): the canonical link applied to mu.
double natural_from_mean(const Family& family, double mu);

double log_base_measure(const Family& family, double y);

// log p(y | theta), including the base measure and Gaussian dispersion.
double log_density(const Family& family, double y, NaturalParam theta);

// 2 * (loglik at the saturated mean - loglik at mu), scaled by dispersion.
double unit_deviance(const Family& family, double y, double mu);

double sample(const Family& family, NaturalParam theta, Rng& rng);

}  // namespace expfam
}  // namespace sglm
