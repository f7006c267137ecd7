#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace sglm {

// Every library failure derives from Error. error_class() is a stable,
// machine-parsable tag the CLI prints on failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* error_class() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "domain"; }
};

class AlignmentError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "alignment"; }
};

class SingularDesignError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "singular_design"; }
};

class LeverageError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "leverage"; }
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd last_beta, int iterations)
        : Error(what), last_beta_(std::move(last_beta)), iterations_(iterations) {}
    const char* error_class() const noexcept override { return "non_convergence"; }
    const Eigen::VectorXd& last_beta() const noexcept { return last_beta_; }
    int iterations() const noexcept { return iterations_; }

private:
    Eigen::VectorXd last_beta_;
    int iterations_;
};

// A per-series GLM failure inside a multi-series pipeline.
class SeriesFitError : public Error {
public:
    SeriesFitError(std::size_t series, const std::string& inner_class, const std::string& what)
        : Error("series " + std::to_string(series) + ": " + what),
          series_(series), inner_class_(inner_class) {}
    const char* error_class() const noexcept override { return "series_fit"; }
    std::size_t series() const noexcept { return series_; }
    const std::string& inner_class() const noexcept { return inner_class_; }

private:
    std::size_t series_;
    std::string inner_class_;
};

class GenerationError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "generation"; }
};

class ParseError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "parse"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* error_class() const noexcept override { return "config"; }
};

}  // namespace sglm
