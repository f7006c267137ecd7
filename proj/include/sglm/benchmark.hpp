#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sglm/residuals.hpp"
#include "sglm/sibling.hpp"
#include "sglm/simulate.hpp"

namespace sglm {

enum class Estimator { Glm, HalfSibling, ThreeQuarter, Sglm };

std::string_view estimator_name(Estimator e) noexcept;
Estimator parse_estimator(std::string_view name);

// Transform applied before the linear sibling estimators: log1p for counts,
// log for Gamma, identity otherwise.
Eigen::MatrixXd transform_observations(const Family& family, const Eigen::MatrixXd& y);

struct BenchmarkConfig {
    Family family = Family::poisson();
    Eigen::Index m = 120;
    std::vector<Eigen::Index> q_grid{2, 6, 11, 21};
    std::vector<Estimator> estimators{Estimator::Glm, Estimator::Sglm};
    std::vector<ResidualKind> residual_kinds{ResidualKind::FisherScaled};
    int replicates = 200;
    std::uint64_t seed = 0;
    double sigma_eps = 0.1;
    CoefficientScheme scheme;
    double gamma_margin = 0.5;
    std::optional<double> offset;
    bool step3_with_x = false;
    NoiseStrategy noise_strategy = NoiseStrategy::Regression;
    int jobs = 1;
};

struct MetricSummary {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};

struct BenchmarkCell {
    Eigen::Index q = 0;
    Estimator estimator = Estimator::Glm;
    std::optional<ResidualKind> residual_kind;  // set for SGLM only
    std::vector<std::optional<MetricsRecord>> replicates;  // nullopt = failed
    std::vector<std::string> errors;
    double seconds = 0.0;

    int n_failed() const;
    MetricSummary mse() const;
    MetricSummary bias() const;
    MetricSummary abs_bias() const;
    MetricSummary noise_corr() const;
    std::string label() const;
};

namespace benchmark {

// Seed of replicate r; shared across q so sweeps are paired.
std::uint64_t replicate_seed(std::uint64_t master, int replicate);

/// Runs every (q, estimator, residual kind) cell over the replicates. The
/// cell order and all numbers are independent of `jobs`.
std::vector<BenchmarkCell> run(const BenchmarkConfig& config);

MetricSummary summarize(const std::vector<double>& values);

}  // namespace benchmark
}  // namespace sglm
