#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wirebend {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input or a violated precondition (bad parameter range, bad JSON shape).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

// One fabrication rule broken at one place in one part.
struct Violation {
    std::optional<int> part;       // part label, when known
    std::string element;           // "vertex" | "segment" | "splice" | "program"
    std::size_t index = 0;
    std::string rule;              // human readable rule text
};

class ConstraintViolation : public Error {
public:
    explicit ConstraintViolation(std::vector<Violation> violations);
    ConstraintViolation(std::string element, std::size_t index, std::string rule);

    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

class TargetUnreachable : public Error {
public:
    TargetUnreachable(double target_deg, double max_actual_deg,
                      std::optional<std::size_t> bend_index = std::nullopt);

    double target_deg() const { return target_deg_; }
    std::optional<std::size_t> bend_index() const { return bend_index_; }

private:
    double target_deg_;
    std::optional<std::size_t> bend_index_;
};

class Unsimplifiable : public Error {
public:
    using Error::Error;
};

class InfeasibleSpec : public Error {
public:
    using Error::Error;
};

class InfeasibleTrack : public Error {
public:
    using Error::Error;
};

class EndpointOccupied : public Error {
public:
    using Error::Error;
};

class SelfSplice : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

}  // namespace wirebend
