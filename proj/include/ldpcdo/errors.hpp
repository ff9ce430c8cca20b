#pragma once

#include <stdexcept>
#include <string>

namespace ldpcdo {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is outside its legal range.
struct InvalidParameter : Error {
    using Error::Error;
};

/// An investment-grade or density assumption does not hold for the inputs.
struct AssumptionViolated : Error {
    using Error::Error;
};

/// The default curve is degenerate (F(T-) in {0,1}) for the requested operation.
struct DegenerateCurve : Error {
    using Error::Error;
};

/// CDS calibration could not bracket a root for the quoted spread.
struct NoRoot : Error {
    using Error::Error;
};

/// The premium leg has zero expectation, so the par spread is undefined.
struct UndefinedSpread : Error {
    using Error::Error;
};

/// Exhaustive enumeration would exceed the outcome cap.
struct CombinatorialBlowup : Error {
    using Error::Error;
};

/// The mixture has no unique dominant state.
struct TieError : Error {
    using Error::Error;
};

/// The run configuration is malformed; the message names the JSON path.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace ldpcdo
