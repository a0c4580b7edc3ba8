#pragma once
#include <stdexcept>
#include <string>

namespace grasp {

// thrown when a kinematic configuration is too close to singular to invert
struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

// thrown when a contact target lies outside the finger workspace
struct UnreachableError : std::runtime_error {
    explicit UnreachableError(const std::string& what) : std::runtime_error(what) {}
};

// thrown on parameter or argument values outside their admissible set
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace grasp
