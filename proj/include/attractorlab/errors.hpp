#pragma once

#include <stdexcept>
#include <string>

namespace attractorlab {

// Error taxonomy used across the library.  Hard contract violations throw;
// outcomes that are themselves data (escape witnesses, lost continuations,
// exhausted budgets) are reported through result structs instead.

struct NotUnimodularError : std::runtime_error {
    explicit NotUnimodularError(const std::string& what) : std::runtime_error(what) {}
};

struct NotHyperbolicError : std::runtime_error {
    explicit NotHyperbolicError(const std::string& what) : std::runtime_error(what) {}
};

// Search horizon exhausted without finding the requested objects.
struct NoneFoundError : std::runtime_error {
    explicit NoneFoundError(const std::string& what) : std::runtime_error(what) {}
};

// A multiplier sits inside the neutrality tolerance: hyperbolicity of the
// periodic orbits cannot be certified.
struct NotMorseSmaleError : std::runtime_error {
    explicit NotMorseSmaleError(const std::string& what) : std::runtime_error(what) {}
};

struct NoPeriodicOrbitsError : std::runtime_error {
    explicit NoPeriodicOrbitsError(const std::string& what) : std::runtime_error(what) {}
};

struct NotPeriodicError : std::runtime_error {
    explicit NotPeriodicError(const std::string& what) : std::runtime_error(what) {}
};

struct CertificateFailedError : std::runtime_error {
    explicit CertificateFailedError(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergenceError : std::runtime_error {
    explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct NotOnStableLeafError : std::runtime_error {
    explicit NotOnStableLeafError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace attractorlab
