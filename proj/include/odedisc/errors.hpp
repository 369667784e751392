/// \file errors.hpp
/// \brief Error taxonomy shared by all odedisc modules.
#pragma once

#include <stdexcept>
#include <string>

namespace odedisc {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- characteristic ---------------------------------------------------------

/// Highest-order coefficient too small for a well-defined companion matrix.
struct LeadingCoefficientZero : Error { using Error::Error; };

/// The iterative eigenvalue solver did not converge.
struct EigenSolveFailure : Error { using Error::Error; };

// -- gensol -----------------------------------------------------------------

/// A basis entry overflowed (|value| above the overflow limit or non-finite).
struct BasisOverflow : Error { using Error::Error; };

/// All singular values of the basis fell below the cutoff.
struct DegenerateBasis : Error { using Error::Error; };

// -- evolve -----------------------------------------------------------------

struct InvalidConfig : Error { using Error::Error; };

// -- bspline ----------------------------------------------------------------

struct InvalidDomain : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

/// A basis function has no data point in its support; the fit is singular.
struct RankDeficientFit : Error { using Error::Error; };

struct OutsideDomain : Error { using Error::Error; };

// -- nullspace --------------------------------------------------------------

struct OrderExceedsDegree : Error { using Error::Error; };
struct AllCoefficientsBelowTolerance : Error { using Error::Error; };

// -- datagen ----------------------------------------------------------------

struct NonPositiveConcentration : Error { using Error::Error; };

// -- pipeline ---------------------------------------------------------------

/// Malformed CSV, config file, or series data.
struct InvalidInput : Error { using Error::Error; };

/// Wraps a stage failure with the name of the pipeline stage that raised it.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace odedisc
