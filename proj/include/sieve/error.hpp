#pragma once

#include <stdexcept>
#include <string>

namespace sieve {

enum class ErrorKind {
    Eps0Violated,
    GuardOverlap,
    DegenerateProfile,
    GeometryBuildFailed,
    InfeasibleScales,
    MeshFailure,
    InvalidPolygon,
    NoConvergence,
    NotSymmetric,
    SingularMassMatrix,
    DegenerateTriangle,
    MissingPair,
    EmptyMarker,
    MeshMismatch,
    EmptyRegion,
    TruncationTooSmall,
    UnsupportedShape,
    PointOnInterface,
    GridMismatch,
    MissingPotential,
    MissingCapacity,
    TruncationInvalid,
    NonPositiveData,
    ConfigError,
    IoError,
};

const char* error_kind_name(ErrorKind kind);

// Coarse classification used by the command-line front end for exit codes.
enum class ErrorClass { Validation, Solver, Other };
ErrorClass classify(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace sieve
