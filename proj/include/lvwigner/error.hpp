#pragma once

#include <stdexcept>
#include <string>

namespace lvw {

// Base class so callers can catch everything thrown by the library in one place.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Argument outside the mathematical domain of an operation.  `guard` names the
// violated condition so front ends can report it verbatim.
class DomainError : public Error {
public:
    DomainError(std::string guard, const std::string& what)
        : Error("domain_error", what), guard_(std::move(guard)) {}
    const std::string& guard() const noexcept { return guard_; }

private:
    std::string guard_;
};

class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error("overflow", what) {}
};

class AccuracyLoss : public Error {
public:
    explicit AccuracyLoss(const std::string& what) : Error("accuracy_loss", what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error("convergence", what) {}
};

class MaskedError : public Error {
public:
    explicit MaskedError(const std::string& what) : Error("masked", what) {}
};

class IllConditioned : public Error {
public:
    explicit IllConditioned(const std::string& what) : Error("ill_conditioned", what) {}
};

class UsageError : public Error {
public:
    UsageError(std::string key, const std::string& what)
        : Error("usage_error", what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace lvw
