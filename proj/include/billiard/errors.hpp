#pragma once

#include <stdexcept>
#include <string>

namespace billiard {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// table validation
struct CuspDetected : Error { using Error::Error; };
struct NonConvexArc : Error { using Error::Error; };
struct OverlappingScatterers : Error { using Error::Error; };
struct OpenBoundaryChain : Error { using Error::Error; };
struct DegenerateCorner : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// lookups and dynamics
struct OutOfRange : Error { using Error::Error; };
struct SingularityTooClose : Error { using Error::Error; };

// singularity-structure experiments
struct CellEmpty : Error { using Error::Error; };
struct UnresolvedFragmentation : Error { using Error::Error; };

struct DichotomyViolated : Error {
    DichotomyViolated(const std::string& msg, double tau0, double tau1, double tau2)
        : Error(msg), tau_x(tau0), tau_fx(tau1), tau_ffx(tau2) {}
    double tau_x, tau_fx, tau_ffx;
};

// perturbation
struct EpsTooLarge : Error { using Error::Error; };
struct NotOnBoundary : Error { using Error::Error; };

// statistics
struct FiniteHorizon : Error { using Error::Error; };

}  // namespace billiard
