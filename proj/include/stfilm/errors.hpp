#pragma once

#include <stdexcept>
#include <string>

// Typed failure modes. Every throwing operation documents which of these it
// can raise; nothing here is ever swallowed silently by the library.
namespace stfilm {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mobility / entropy domain violations
struct NegativeHeight final : SimError { using SimError::SimError; };
struct NonPositiveHeight final : SimError { using SimError::SimError; };
struct LimitMobilityHasNoEpsilonEntropy final : SimError { using SimError::SimError; };
struct NegativeInitialData final : SimError { using SimError::SimError; };

// Wiener path
struct InvalidHorizon final : SimError { using SimError::SimError; };
struct NotAKnot final : SimError { using SimError::SimError; };

// implicit solver
struct NewtonDivergence final : SimError { using SimError::SimError; };
struct PositivityLoss final : SimError { using SimError::SimError; };
struct LinearSolveFailure final : SimError { using SimError::SimError; };
struct StepCollapse final : SimError { using SimError::SimError; };

// splitting orchestration
struct PathGridMismatch final : SimError { using SimError::SimError; };

// diagnostics
struct InsufficientData final : SimError { using SimError::SimError; };
struct EnergyUnderflow final : SimError { using SimError::SimError; };
struct InvalidBound final : SimError { using SimError::SimError; };

// configuration / io
struct ConfigError final : SimError { using SimError::SimError; };
struct IoError final : SimError { using SimError::SimError; };

} // namespace stfilm
