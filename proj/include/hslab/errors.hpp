#pragma once

#include <stdexcept>
#include <string>

namespace hslab {

// Exit-code category used by the CLI: 2 config, 3 numerical, 4 invariant.
enum class ErrorKind { Config, Numerical, Invariant };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

#define HSLAB_DEFINE_ERROR(Name, Kind)                                         \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    }

HSLAB_DEFINE_ERROR(DomainError, Numerical);
HSLAB_DEFINE_ERROR(PoleError, Numerical);
HSLAB_DEFINE_ERROR(ParameterError, Config);
HSLAB_DEFINE_ERROR(DegenerateError, Numerical);
HSLAB_DEFINE_ERROR(BranchError, Numerical);
HSLAB_DEFINE_ERROR(StepError, Numerical);
HSLAB_DEFINE_ERROR(SingularStartError, Numerical);
HSLAB_DEFINE_ERROR(CriticalLevelError, Numerical);
HSLAB_DEFINE_ERROR(SeedError, Numerical);
HSLAB_DEFINE_ERROR(UnsupportedDomainError, Config);
HSLAB_DEFINE_ERROR(AddressError, Config);
HSLAB_DEFINE_ERROR(AdjacencyError, Config);
HSLAB_DEFINE_ERROR(WalkOverflowError, Numerical);
HSLAB_DEFINE_ERROR(EmptyInterfaceError, Numerical);
HSLAB_DEFINE_ERROR(SolveError, Numerical);
HSLAB_DEFINE_ERROR(EmptyCurveError, Config);
HSLAB_DEFINE_ERROR(MissingDropletError, Config);
HSLAB_DEFINE_ERROR(OverlapError, Config);
HSLAB_DEFINE_ERROR(SourceOutsideError, Config);
HSLAB_DEFINE_ERROR(IoError, Config);
HSLAB_DEFINE_ERROR(ConfigError, Config);

#undef HSLAB_DEFINE_ERROR

// Raised when a simulation postcondition fails; carries the replay data of the
// offending event so the state can be reconstructed offline.
class InvariantViolation : public Error {
public:
    InvariantViolation(const std::string& what, std::string replay = {})
        : Error(ErrorKind::Invariant, what), replay_(std::move(replay)) {}
    const std::string& replay() const { return replay_; }

private:
    std::string replay_;
};

}  // namespace hslab
