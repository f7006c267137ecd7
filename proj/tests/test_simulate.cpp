#include <doctest.h>

#include <cmath>

#include "sglm/inference.hpp"
#include "sglm/simulate.hpp"

using namespace sglm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("generation is deterministic and seed-dependent") {
    SimConfig c;
    c.seed = 17;
    const SimTruth a = simulate::generate(c);
    const SimTruth b = simulate::generate(c);
    CHECK(a.y == b.y);
    CHECK(a.theta == b.theta);
    CHECK(a.x == b.x);
    CHECK(a.w_n == b.w_n);
    c.seed = 18;
    const SimTruth other = simulate::generate(c);
    CHECK(other.x != a.x);
    CHECK(other.y != a.y);
}

TEST_CASE("changing q keeps the shared series identical") {
    SimConfig c;
    c.seed = 3;
    c.q = 6;
    const SimTruth small = simulate::generate(c);
    c.q = 21;
    const SimTruth big = simulate::generate(c);
    CHECK(small.x == big.x);
    CHECK(small.noise == big.noise);
    CHECK(small.w_x == big.w_x.head(6));
    CHECK(small.w_n == big.w_n.head(6));
    CHECK(small.y == big.y.leftCols(6));
}

TEST_CASE("generated structure") {
    SimConfig c;
    c.seed = 5;
    c.m = 200;
    c.q = 4;
    const SimTruth t = simulate::generate(c);
    for (Eigen::Index j = 0; j < 4; ++j) {
        CHECK(t.w_x[j] >= 0.5);
        CHECK(t.w_x[j] <= 1.5);
        CHECK(std::abs(t.w_n[j]) <= 1.0);
        for (Eigen::Index i = 0; i < 200; ++i) {
            CHECK(t.theta(i, j) == t.offset + t.w_x[j] * t.x[i] + t.w_n[j] * t.noise[i] + t.eps(i, j));
            CHECK(t.z(i, j) == t.w_x[j] * t.x[i]);
            CHECK(t.y(i, j) == std::floor(t.y(i, j)));
        }
    }
    CHECK(t.offset == 0.0);
    CHECK(t.signal(1) == t.z.col(1));
}

TEST_CASE("offset override shifts only the natural parameter") {
    SimConfig c;
    c.seed = 9;
    const SimTruth base = simulate::generate(c);
    c.offset = 1.0;
    const SimTruth shifted = simulate::generate(c);
    CHECK(shifted.offset == 1.0);
    CHECK(shifted.z == base.z);
    CHECK(shifted.noise == base.noise);
    CHECK((shifted.theta.array() - base.theta.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(shifted.y.mean() > base.y.mean());
}

TEST_CASE("gamma panels stay in domain") {
    SimConfig c;
    c.family = Family::gamma(2.0);
    c.seed = 9;
    c.m = 500;
    const SimTruth t = simulate::generate(c);
    CHECK(t.offset == -3.5);
    CHECK(t.theta.maxCoeff() < 0.0);
    CHECK(t.y.minCoeff() > 0.0);

    c.gamma_margin = -3.0;  // no shift: positive natural parameters appear
    CHECK_THROWS_AS(simulate::generate(c), GenerationError);
}

TEST_CASE("config validation") {
    SimConfig c;
    c.q = 1;
    CHECK_THROWS_AS(simulate::generate(c), ConfigError);
    c.q = 3;
    c.m = 1;
    CHECK_THROWS_AS(simulate::generate(c), ConfigError);
    c.m = 10;
    c.sigma_eps = -0.1;
    CHECK_THROWS_AS(simulate::generate(c), ConfigError);
}

TEST_CASE("uniform moments of X and N") {
    SimConfig c;
    c.m = 100000;
    c.q = 2;
    c.seed = 1;
    const SimTruth t = simulate::generate(c);
    for (const VectorXd* v : {&t.x, &t.noise}) {
        const double mean = v->mean();
        const double var = (v->array() - mean).square().mean();
        CHECK(std::abs(mean) < 0.01);
        CHECK(std::abs(var - 1.0 / 3.0) < 0.02 / 3.0);
    }
}

TEST_CASE("response means match the family mean at theta") {
    for (const Family& f : {Family::poisson(), Family::gamma(2.0), Family::bernoulli(), Family::gaussian(1.0)}) {
        SimConfig c;
        c.family = f;
        c.m = 20000;
        c.q = 3;
        c.seed = 4;
        const SimTruth t = simulate::generate(c);
        for (Eigen::Index j = 0; j < 3; ++j) {
            double mean_mu = 0.0, mean_var = 0.0;
            for (Eigen::Index i = 0; i < c.m; ++i) {
                const NaturalParam th(f, t.theta(i, j));
                mean_mu += expfam::mean(f, th);
                mean_var += expfam::variance(f, th);
            }
            mean_mu /= c.m;
            mean_var /= c.m;
            // Conditional on theta the draws are independent.
            const double se = std::sqrt(mean_var / c.m);
            CHECK(std::abs(t.y.col(j).mean() - mean_mu) <= 4.0 * se);
        }
    }
}

TEST_CASE("clean columns are recovered by the GLM") {
    SimConfig c;
    c.m = 1000;
    c.q = 5;
    c.sigma_eps = 0.0;
    c.scheme.fixed_wn = 0.0;
    c.seed = 12;
    const SimTruth t = simulate::generate(c);
    const Panel panel = simulate::to_panel(t);
    for (Eigen::Index j = 0; j < 5; ++j) {
        const VectorXd y = t.y.col(j);
        const GlmFit fit = glm::fit(panel.design(), y, c.family);
        const auto cov = inference::sandwich(fit, panel.design(), y);
        CHECK(std::abs(fit.beta[1] - t.w_x[j]) <= 3.0 * cov.standard_errors[1]);
        CHECK(std::abs(fit.beta[0]) <= 3.0 * cov.standard_errors[0]);
    }
}

TEST_CASE("metrics") {
    SimConfig c;
    c.m = 50;
    c.q = 3;
    c.seed = 2;
    const SimTruth t = simulate::generate(c);
    const MetricsRecord exact = simulate::metrics(t, t.signal(0), t.w_x[0], t.noise);
    CHECK(exact.mse == 0.0);
    CHECK(*exact.bias == 0.0);
    CHECK(*exact.noise_corr == doctest::Approx(1.0));
    const MetricsRecord flipped = simulate::metrics(t, t.signal(0), std::nullopt, VectorXd(-t.noise));
    CHECK(*flipped.noise_corr == doctest::Approx(-1.0));
    CHECK_FALSE(flipped.bias.has_value());
    const MetricsRecord shifted = simulate::metrics(t, VectorXd(t.signal(0).array() + 0.5), 1.1 * t.w_x[0]);
    CHECK(shifted.mse == doctest::Approx(0.25));
    CHECK(*shifted.bias == doctest::Approx(0.1));
    CHECK_THROWS_AS(simulate::metrics(t, VectorXd::Zero(3)), AlignmentError);
}
