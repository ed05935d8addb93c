#pragma once
#include <stdexcept>
#include <string>

namespace covertflow {

// Validation failures (bad inputs, bad config) map to CLI exit code 1,
// everything else escaping to main maps to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneratePool : ValidationError {
    DegeneratePool() : ValidationError("pool has a zero reserve and cannot trade") {}
};

struct BundleError : ValidationError {
    explicit BundleError(const std::string& what) : ValidationError(what) {}
};

struct EstimationFailed : std::runtime_error {
    EstimationFailed() : std::runtime_error("no probe landed as the final transaction of a block") {}
};

struct InsufficientCapital : ValidationError {
    explicit InsufficientCapital(const std::string& what) : ValidationError(what) {}
};

struct ZeroCapital : ValidationError {
    explicit ZeroCapital(const std::string& id)
        : ValidationError("incident " + id + " has non-positive capital") {}
};

struct UnknownAsset : ValidationError {
    explicit UnknownAsset(const std::string& asset)
        : ValidationError("asset not in price table: " + asset) {}
};

struct EmptyInput : ValidationError {
    explicit EmptyInput(const std::string& what) : ValidationError(what) {}
};

struct InsufficientTail : ValidationError {
    explicit InsufficientTail(const std::string& what) : ValidationError(what) {}
};

struct LengthMismatch : ValidationError {
    LengthMismatch() : ValidationError("input vectors have different lengths") {}
};

struct SingularCorrelation : std::runtime_error {
    SingularCorrelation() : std::runtime_error("correlation matrix projection failed") {}
};

struct DegenerateModel : std::runtime_error {
    DegenerateModel() : std::runtime_error("copula model is degenerate") {}
};

struct MissingFile : ValidationError {
    explicit MissingFile(const std::string& path) : ValidationError("cannot open file: " + path) {}
};

} // namespace covertflow
