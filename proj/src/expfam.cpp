#include "sglm/expfam.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace sglm {

namespace {

std::string describe(const Family& family, double theta) {
    return std::string(family.name()) + " natural parameter " + std::to_string(theta) +
           " outside domain";
}

double logistic(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

Family::Family(FamilyKind kind, double dispersion) : kind_(kind), dispersion_(dispersion) {
    if (!(dispersion > 0.0) || !std::isfinite(dispersion))
        throw DomainError("dispersion must be positive and finite");
    if ((kind == FamilyKind::Poisson || kind == FamilyKind::Bernoulli) && dispersion != 1.0)
        throw DomainError(std::string(name()) + " dispersion is fixed at 1");
}

std::string_view Family::name() const noexcept {
    switch (kind_) {
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Poisson: return "poisson";
    case FamilyKind::Bernoulli: return "bernoulli";
    case FamilyKind::Gamma: return "gamma";
    }
    return "unknown";
}

bool Family::in_domain(double theta) const noexcept {
    if (!std::isfinite(theta)) return false;
    return kind_ != FamilyKind::Gamma || theta < 0.0;
}

bool Family::in_support(double y) const noexcept {
    if (!std::isfinite(y)) return false;
    switch (kind_) {
    case FamilyKind::Gaussian: return true;
    case FamilyKind::Poisson: return y >= 0.0;
    case FamilyKind::Bernoulli: return y == 0.0 || y == 1.0;
    case FamilyKind::Gamma: return y > 0.0;
    }
    return false;
}

bool Family::valid_mean(double mu) const noexcept {
    if (!std::isfinite(mu)) return false;
    switch (kind_) {
    case FamilyKind::Gaussian: return true;
    case FamilyKind::Poisson:
    case FamilyKind::Gamma: return mu > 0.0;
    case FamilyKind::Bernoulli: return mu > 0.0 && mu < 1.0;
    }
    return false;
}

FamilyKind parse_family_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "gaussian" || lower == "normal") return FamilyKind::Gaussian;
    if (lower == "poisson") return FamilyKind::Poisson;
    if (lower == "bernoulli" || lower == "binomial" || lower == "logistic")
        return FamilyKind::Bernoulli;
    if (lower == "gamma") return FamilyKind::Gamma;
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

NaturalParam::NaturalParam(const Family& family, double value) : value_(value) {
    if (!family.in_domain(value)) throw DomainError(describe(family, value));
}

namespace expfam {

double log_partition(const Family& family, NaturalParam theta) {
    const double t = theta.value();
    switch (family.kind()) {
    case FamilyKind::Gaussian: return 0.5 * t * t;
    case FamilyKind::Poisson: return std::exp(t);
    case FamilyKind::Bernoulli: return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
    case FamilyKind::Gamma: return -family.dispersion() * std::log(-t);
    }
    return 0.0;
}

double mean(const Family& family, NaturalParam theta) {
    const double t = theta.value();
    switch (family.kind()) {
    case FamilyKind::Gaussian: return t;
    case FamilyKind::Poisson: return std::exp(t);
    case FamilyKind::Bernoulli: return logistic(t);
    case FamilyKind::Gamma: return -family.dispersion() / t;
    }
    return 0.0;
}

double fisher_info(const Family& family, NaturalParam theta) {
    const double t = theta.value();
    switch (family.kind()) {
    case FamilyKind::Gaussian: return 1.0;
    case FamilyKind::Poisson: return std::exp(t);
    case FamilyKind::Bernoulli: {
        const double e = std::exp(-std::abs(t));
        return e / ((1.0 + e) * (1.0 + e));
    }
    case FamilyKind::Gamma: return family.dispersion() / (t * t);
    }
    return 0.0;
}

double variance(const Family& family, NaturalParam theta) {
    const double info = fisher_info(family, theta);
    return family.kind() == FamilyKind::Gaussian ? family.dispersion() * info : info;
}

double natural_from_mean(const Family& family, double mu) {
    if (!family.valid_mean(mu))
        throw DomainError("invalid " + std::string(family.name()) + " mean " + std::to_string(mu));
    switch (family.kind()) {
    case FamilyKind::Gaussian: return mu;
    case FamilyKind::Poisson: return std::log(mu);
    case FamilyKind::Bernoulli: return std::log(mu) - std::log1p(-mu);
    case FamilyKind::Gamma: return -family.dispersion() / mu;
    }
    return 0.0;
}

double log_base_measure(const Family& family, double y) {
    if (!family.in_support(y))
        throw DomainError("y=" + std::to_string(y) + " outside " + std::string(family.name()) +
                          " support");
    switch (family.kind()) {
    case FamilyKind::Gaussian: {
        const double s = family.dispersion();
        return -0.5 * y * y / s - 0.5 * std::log(2.0 * std::numbers::pi * s);
    }
    case FamilyKind::Poisson: return -std::lgamma(y + 1.0);
    case FamilyKind::Bernoulli: return 0.0;
    case FamilyKind::Gamma: {
        const double k = family.dispersion();
        return (k - 1.0) * std::log(y) - std::lgamma(k);
    }
    }
    return 0.0;
}

double log_density(const Family& family, double y, NaturalParam theta) {
    const double core = theta.value() * y - log_partition(family, theta);
    const double scale = family.kind() == FamilyKind::Gaussian ? family.dispersion() : 1.0;
    return core / scale + log_base_measure(family, y);
}

double unit_deviance(const Family& family, double y, double mu) {
    if (!family.valid_mean(mu))
        throw DomainError("invalid " + std::string(family.name()) + " mean " + std::to_string(mu));
    if (!family.in_support(y))
        throw DomainError("y=" + std::to_string(y) + " outside " + std::string(family.name()) +
                          " support");
    double d = 0.0;
    switch (family.kind()) {
    case FamilyKind::Gaussian: d = (y - mu) * (y - mu) / family.dispersion(); break;
    case FamilyKind::Poisson:
        d = 2.0 * ((y > 0.0 ? y * std::log(y / mu) : 0.0) - (y - mu));
        break;
    case FamilyKind::Bernoulli:
        d = y == 1.0 ? -2.0 * std::log(mu) : -2.0 * std::log1p(-mu);
        break;
    case FamilyKind::Gamma:
        d = 2.0 * family.dispersion() * ((y - mu) / mu - std::log(y / mu));
        break;
    }
    return std::max(d, 0.0);
}

double sample(const Family& family, NaturalParam theta, Rng& rng) {
    const double t = theta.value();
    switch (family.kind()) {
    case FamilyKind::Gaussian:
        return std::normal_distribution<double>(t, std::sqrt(family.dispersion()))(rng);
    case FamilyKind::Poisson:
        return static_cast<double>(std::poisson_distribution<long long>(std::exp(t))(rng));
    case FamilyKind::Bernoulli:
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < logistic(t) ? 1.0 : 0.0;
    case FamilyKind::Gamma:
        return std::gamma_distribution<double>(family.dispersion(), -1.0 / t)(rng);
    }
    return 0.0;
}

}  // namespace expfam
}  // namespace sglm
