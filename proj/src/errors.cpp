#include "wirebend/errors.hpp"

#include <sstream>

namespace wirebend {

namespace {

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << "constraint violation";
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        os << (i == 0 ? ": " : "; ");
        if (v.part) os << "part " << *v.part << " ";
        os << v.element << " " << v.index << ": " << v.rule;
    }
    return os.str();
}

std::string describe_target(double target, double max_actual, std::optional<std::size_t> bend) {
    std::ostringstream os;
    os << "target angle " << target << " deg exceeds achievable " << max_actual << " deg";
    if (bend) os << " at bend " << *bend;
    return os.str();
}

}  // namespace

ConstraintViolation::ConstraintViolation(std::vector<Violation> violations)
    : Error(describe(violations)), violations_(std::move(violations)) {}

ConstraintViolation::ConstraintViolation(std::string element, std::size_t index, std::string rule)
    : ConstraintViolation(std::vector<Violation>{
          Violation{std::nullopt, std::move(element), index, std::move(rule)}}) {}

TargetUnreachable::TargetUnreachable(double target_deg, double max_actual_deg,
                                     std::optional<std::size_t> bend_index)
    : Error(describe_target(target_deg, max_actual_deg, bend_index)),
      target_deg_(target_deg),
      bend_index_(bend_index) {}

}  // namespace wirebend
