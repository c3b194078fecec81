#ifndef HSF_ERRORS_HPP
#define HSF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hsf {

// Base for everything thrown by the library. Two subfamilies so the CLI can
// map them to exit codes: bad input (exit 2) vs numerical failure (exit 3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

// -- expr --------------------------------------------------------------
struct SyntaxError : ValidationError {
    std::size_t position;
    std::string expected;
    SyntaxError(std::size_t pos, const std::string& exp)
        : ValidationError("syntax error at position " + std::to_string(pos) +
                          ": expected " + exp),
          position(pos), expected(exp) {}
};

struct UnknownIdentifier : ValidationError {
    std::size_t position;
    std::string name;
    UnknownIdentifier(std::size_t pos, const std::string& id)
        : ValidationError("unknown identifier '" + id + "' at position " +
                          std::to_string(pos) + " (only z, w, i are allowed)"),
          position(pos), name(id) {}
};

struct EvalPole : NumericalError {
    std::string node;
    explicit EvalPole(const std::string& node_text)
        : NumericalError("evaluation hit a pole in subexpression: " + node_text),
          node(node_text) {}
};

// -- series ------------------------------------------------------------
struct VariableMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct NonzeroConstantTerm : ValidationError {
    using ValidationError::ValidationError;
};
struct ZeroConstantTerm : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateLinearPart : ValidationError {
    using ValidationError::ValidationError;
};
struct TooFewCoefficients : ValidationError {
    using ValidationError::ValidationError;
};

// -- systems -----------------------------------------------------------
struct SchemaError : ValidationError {
    using ValidationError::ValidationError;
};
struct FamilyInvariantViolated : ValidationError {
    using ValidationError::ValidationError;
};
struct NewtonDivergence : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateRoot : NumericalError {
    using NumericalError::NumericalError;
};

// -- briot_bouquet -----------------------------------------------------
struct Resonance : NumericalError {
    int k;
    explicit Resonance(int kk)
        : NumericalError("Briot-Bouquet resonance: lambda is within 1e-9 of the "
                         "positive integer " + std::to_string(kk)),
          k(kk) {}
};
struct DegenerateAlpha : ValidationError {
    using ValidationError::ValidationError;
};

// -- manifolds ---------------------------------------------------------
struct FactorizationMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct PrimitiveMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct RecurrenceBreakdown : NumericalError {
    using NumericalError::NumericalError;
};
struct FamilyParamError : ValidationError {
    using ValidationError::ValidationError;
};

// -- dynamics ----------------------------------------------------------
struct StepUnderflow : NumericalError {
    using NumericalError::NumericalError;
};
struct MaxSteps : NumericalError {
    using NumericalError::NumericalError;
};
struct UnclassifiableAtTolerance : NumericalError {
    using NumericalError::NumericalError;
};

// -- verify ------------------------------------------------------------
struct AlphaNotPureImaginary : ValidationError {
    using ValidationError::ValidationError;
};
struct RegionExit : NumericalError {
    using NumericalError::NumericalError;
};
struct WindowMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct DomainExit : NumericalError {
    std::size_t sample_index;
    explicit DomainExit(std::size_t idx)
        : NumericalError("trajectory sample " + std::to_string(idx) +
                         " left the manifold domain"),
          sample_index(idx) {}
};
struct UnsupportedFamily : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace hsf

#endif
