#include "sieve/error.hpp"

namespace sieve {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Eps0Violated: return "Eps0Violated";
    case ErrorKind::GuardOverlap: return "GuardOverlap";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::GeometryBuildFailed: return "GeometryBuildFailed";
    case ErrorKind::InfeasibleScales: return "InfeasibleScales";
    case ErrorKind::MeshFailure: return "MeshFailure";
    case ErrorKind::InvalidPolygon: return "InvalidPolygon";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::SingularMassMatrix: return "SingularMassMatrix";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::MissingPair: return "MissingPair";
    case ErrorKind::EmptyMarker: return "EmptyMarker";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::PointOnInterface: return "PointOnInterface";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::MissingPotential: return "MissingPotential";
    case ErrorKind::MissingCapacity: return "MissingCapacity";
    case ErrorKind::TruncationInvalid: return "TruncationInvalid";
    case ErrorKind::NonPositiveData: return "NonPositiveData";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorClass classify(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Eps0Violated:
    case ErrorKind::GuardOverlap:
    case ErrorKind::DegenerateProfile:
    case ErrorKind::InfeasibleScales:
    case ErrorKind::InvalidPolygon:
    case ErrorKind::ConfigError:
    case ErrorKind::UnsupportedShape:
        return ErrorClass::Validation;
    case ErrorKind::NoConvergence:
    case ErrorKind::NotSymmetric:
    case ErrorKind::SingularMassMatrix:
    case ErrorKind::MeshFailure:
    case ErrorKind::DegenerateTriangle:
    case ErrorKind::TruncationTooSmall:
        return ErrorClass::Solver;
    default:
        return ErrorClass::Other;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace sieve
