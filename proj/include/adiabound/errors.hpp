#pragma once

#include <stdexcept>
#include <string>

namespace adiabound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input violates a structural invariant (Hermiticity, idempotence, ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    using Error::Error;
};

/// The tracked band touches the rest of the spectrum at parameter value s().
class GapClosureError : public Error {
public:
    GapClosureError(double s, double gap)
        : Error("spectral gap closes at s=" + std::to_string(s) +
                " (gap=" + std::to_string(gap) + ")"),
          s_(s), gap_(gap) {}

    double s() const noexcept { return s_; }
    double gap() const noexcept { return gap_; }

private:
    double s_;
    double gap_;
};

/// A perturbation lemma was asked for outside its hypotheses.
class InapplicableBoundError : public Error {
public:
    using Error::Error;
};

class EnvironmentTooHotError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Sampling window or resolution too coarse for the requested suprema.
class WindowError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double t, double h, long steps)
        : Error(what + " at t=" + std::to_string(t) + " (h=" + std::to_string(h) +
                ", accepted steps=" + std::to_string(steps) + ")"),
          t_(t), h_(h), steps_(steps) {}

    double t() const noexcept { return t_; }
    double step() const noexcept { return h_; }
    long accepted_steps() const noexcept { return steps_; }

private:
    double t_;
    double h_;
    long steps_;
};

class StepCriterionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace adiabound
