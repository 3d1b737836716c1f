#pragma once

#include <stdexcept>
#include <string>

namespace symphonic {

/// Argument outside the closed interval a formula is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Formula evaluated at a point where it is singular (t = 0 or t = pi/2).
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Profile violates pinning, box or grid invariants.
class InvalidProfile : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No slope bracket straddles the far boundary value, even after widening.
class BracketFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace symphonic
