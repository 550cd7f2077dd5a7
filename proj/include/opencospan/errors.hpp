#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace opencospan {

// Base of all library errors; code() is the stable machine-readable name.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define OPENCOSPAN_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    };

OPENCOSPAN_DEFINE_ERROR(DomainMismatch)    // pushout legs must share their domain
OPENCOSPAN_DEFINE_ERROR(CodomainMismatch)  // copairing needs a common codomain
OPENCOSPAN_DEFINE_ERROR(FootMismatch)      // series composition needs equal middle feet
OPENCOSPAN_DEFINE_ERROR(TypeMismatch)      // value ill-typed for the requested operation
OPENCOSPAN_DEFINE_ERROR(NotEnabled)        // transition lacks input tokens
OPENCOSPAN_DEFINE_ERROR(UnknownTransition) // transition label not in the net
OPENCOSPAN_DEFINE_ERROR(InvalidMorphism)   // commuting-square condition fails
OPENCOSPAN_DEFINE_ERROR(ScopeMismatch)     // map/field scopes disagree
OPENCOSPAN_DEFINE_ERROR(ShapeMismatch)     // vector length differs from interface size
OPENCOSPAN_DEFINE_ERROR(NonFiniteState)    // integration produced NaN/infinity
OPENCOSPAN_DEFINE_ERROR(Mismatch)          // steady-state gluing data disagrees
OPENCOSPAN_DEFINE_ERROR(LawViolation)      // a Frobenius law failed the iso check
OPENCOSPAN_DEFINE_ERROR(DivisionByZero)    // zero denominator (construction or runtime)
OPENCOSPAN_DEFINE_ERROR(UnboundVariable)   // evaluation met an unassigned variable
OPENCOSPAN_DEFINE_ERROR(ParseError)        // malformed expression or file

#undef OPENCOSPAN_DEFINE_ERROR

} // namespace opencospan
