#pragma once

#include <stdexcept>
#include <string>

namespace hypflow {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct NotHyperbolic : DomainError {
    explicit NotHyperbolic(const std::string& what) : DomainError(what) {}
};

struct RealizationError : std::runtime_error {
    explicit RealizationError(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct LiftError : std::runtime_error {
    explicit LiftError(const std::string& what) : std::runtime_error(what) {}
};

struct AlignmentError : std::runtime_error {
    explicit AlignmentError(const std::string& what) : std::runtime_error(what) {}
};

struct IncompleteSamples : std::runtime_error {
    explicit IncompleteSamples(const std::string& what) : std::runtime_error(what) {}
};

struct DomainMismatch : std::runtime_error {
    explicit DomainMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ConstraintViolation : std::runtime_error {
    explicit ConstraintViolation(const std::string& what) : std::runtime_error(what) {}
};

struct RefinementExhausted : std::runtime_error {
    explicit RefinementExhausted(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hypflow
