#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsl2 {

enum class ErrorCode {
    NonManifold,
    IncoherentOrientation,
    BoundaryVertex,
    BoundaryEdge,
    NotClosed,
    VertexNotInTriangle,
    InvalidPath,
    SeedNotInFirstTriangle,
    NonPositiveWeight,
    NotSL2,
    Disconnected,
    InconsistentRho,
    UnsatisfiableLoopValues,
    NoColoring,
    NonPositiveOffdiag,
    ColorMismatch,
    NonPositiveCoefficient,
    GaugeNotFound,
    DegenerateCoefficient,
    ZeroPotential,
    SingularGauge,
    SingularDenominator,
    MissingLayer,
    CoefficientSumNonzero,
    InconsistentA,
    TreeNotConnected,
    IsolatedVertex,
    NonPositiveConductivity,
    InvalidKStructure,
    ZeroW,
    NoKernelVector,
    InvalidInput,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::IncoherentOrientation: return "IncoherentOrientation";
    case ErrorCode::BoundaryVertex: return "BoundaryVertex";
    case ErrorCode::BoundaryEdge: return "BoundaryEdge";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::VertexNotInTriangle: return "VertexNotInTriangle";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::SeedNotInFirstTriangle: return "SeedNotInFirstTriangle";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NotSL2: return "NotSL2";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::InconsistentRho: return "InconsistentRho";
    case ErrorCode::UnsatisfiableLoopValues: return "UnsatisfiableLoopValues";
    case ErrorCode::NoColoring: return "NoColoring";
    case ErrorCode::NonPositiveOffdiag: return "NonPositiveOffdiag";
    case ErrorCode::ColorMismatch: return "ColorMismatch";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::GaugeNotFound: return "GaugeNotFound";
    case ErrorCode::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorCode::ZeroPotential: return "ZeroPotential";
    case ErrorCode::SingularGauge: return "SingularGauge";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::MissingLayer: return "MissingLayer";
    case ErrorCode::CoefficientSumNonzero: return "CoefficientSumNonzero";
    case ErrorCode::InconsistentA: return "InconsistentA";
    case ErrorCode::TreeNotConnected: return "TreeNotConnected";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::NonPositiveConductivity: return "NonPositiveConductivity";
    case ErrorCode::InvalidKStructure: return "InvalidKStructure";
    case ErrorCode::ZeroW: return "ZeroW";
    case ErrorCode::NoKernelVector: return "NoKernelVector";
    case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Evolution step failure; wraps the transform error with the failing step index.
class StepError : public Error {
public:
    StepError(ErrorCode code, int step, const std::string& what)
        : Error(code, "step " + std::to_string(step) + ": " + what), step_(step) {}

    [[nodiscard]] int step() const noexcept { return step_; }

private:
    int step_;
};

} // namespace dsl2
