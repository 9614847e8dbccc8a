#ifndef TRANSITCLUST_ERRORS_HPP
#define TRANSITCLUST_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace transitclust {

/// Base class for all domain errors; the CLI maps these to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    SyntaxError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

struct DuplicateVertexLabel : Error {
    using Error::Error;
};

struct SelfLoop : Error {
    using Error::Error;
};

struct CycleDetected : Error {
    CycleDetected(const std::string& what, std::vector<std::string> cycle)
        : Error(what), cycle(std::move(cycle)) {}
    std::vector<std::string> cycle;
};

struct UnknownVertex : Error {
    using Error::Error;
};

struct GraphNotConnected : Error {
    using Error::Error;
};

struct EmptyCluster : Error {
    using Error::Error;
};

struct ClusterIsWholeGraph : Error {
    using Error::Error;
};

struct LabelCollision : Error {
    using Error::Error;
};

struct NotDisjoint : Error {
    using Error::Error;
};

struct GraphTooLargeForOracle : Error {
    using Error::Error;
};

struct InventoryGraphMismatch : Error {
    using Error::Error;
};

struct OpPreconditionViolated : Error {
    using Error::Error;
};

struct WouldCreateCycle : Error {
    using Error::Error;
};

struct FreshLabelCollision : Error {
    using Error::Error;
};

struct LatentHasParent : Error {
    using Error::Error;
};

struct LatentTooManyChildren : Error {
    using Error::Error;
};

struct LatentChildLatent : Error {
    using Error::Error;
};

struct SetsOverlap : Error {
    using Error::Error;
};

struct QueryOutsideObserved : Error {
    using Error::Error;
};

struct ClusterIntersectsQuery : Error {
    using Error::Error;
};

} // namespace transitclust

#endif
