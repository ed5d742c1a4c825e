#pragma once

#include <stdexcept>
#include <string>

namespace lticlust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix dimensions of a state-space model do not agree.
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// A requested horizon does not fit the available data or Markov blocks.
class HorizonError : public Error {
public:
    using Error::Error;
};

/// The model is not strictly stable but the operation needs a summable tail.
class NotStableError : public Error {
public:
    using Error::Error;
};

/// The stacked input matrix is numerically rank deficient.
class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}

    /// sigma_max / sigma_min of the offending matrix (+inf if sigma_min == 0).
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Hankel factorization cannot support the requested order.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// Input to k-means cannot be split into the requested number of clusters.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Page partition with zero columns per set.
class PartitionEmptyError : public Error {
public:
    using Error::Error;
};

/// A cluster has no trajectory long enough for pooled refinement.
class InsufficientLengthError : public Error {
public:
    InsufficientLengthError(const std::string& what, int cluster)
        : Error(what), cluster_(cluster) {}
    int cluster() const noexcept { return cluster_; }

private:
    int cluster_;
};

/// Rejection sampling of well-separated centers gave up.
class InfeasibleSeparationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lticlust
