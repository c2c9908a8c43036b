#pragma once

#include <stdexcept>
#include <string>

namespace etchforge {

/// Base class for all pipeline errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A JSONL line that does not match the documented schema.
struct MalformedRecord : Error {
    MalformedRecord(std::string file_, std::size_t line_, std::string reason_)
        : Error(file_ + ":" + std::to_string(line_) + ": " + reason_),
          file(std::move(file_)), line(line_), reason(std::move(reason_)) {}

    std::string file;
    std::size_t line;
    std::string reason;
};

/// A required stream file is absent.
struct MissingFile : Error {
    explicit MissingFile(const std::string& path) : Error("missing file: " + path), path(path) {}
    std::string path;
};

struct DuplicateRunId : Error {
    explicit DuplicateRunId(const std::string& run_id)
        : Error("duplicate run id: " + run_id), run_id(run_id) {}
    std::string run_id;
};

/// A filter or cleaning step left nothing behind.
struct EmptyResult : Error {
    using Error::Error;
};

struct InvalidConfig : Error {
    using Error::Error;
};

/// A run's recipe has no fitted statistics (unseen at training time).
struct UnknownRecipe : Error {
    explicit UnknownRecipe(const std::string& recipe)
        : Error("recipe not present in fitted stats: " + recipe), recipe(recipe) {}
    std::string recipe;
};

/// No fitted sensor column is referenced by any limit definition.
struct EmptySelection : Error {
    using Error::Error;
};

/// Prediction-time columns do not match the fit-time schema.
struct SchemaMismatch : Error {
    using Error::Error;
};

/// Classification target with a single class.
struct DegenerateTarget : Error {
    using Error::Error;
};

struct InvalidModelSpec : Error {
    using Error::Error;
};

struct TooFewSegments : Error {
    using Error::Error;
};

struct ZeroBenchmark : Error {
    using Error::Error;
};

}  // namespace etchforge
