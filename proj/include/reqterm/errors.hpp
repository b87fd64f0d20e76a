#pragma once

#include <stdexcept>
#include <string>

namespace reqterm {

// Base for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// text_pipeline
struct EmptyDocument : Error {
    explicit EmptyDocument(const std::string& doc_id)
        : Error("no sentence found in document '" + doc_id + "'") {}
};

// mlm_gateway
struct ModelNotFound : Error {
    explicit ModelNotFound(const std::string& spec)
        : Error("unknown backend or model path: '" + spec + "'") {}
};
struct BackendUnavailable : Error {
    explicit BackendUnavailable(const std::string& why)
        : Error("backend unavailable: " + why) {}
};
struct QueryTooLong : Error {
    QueryTooLong(std::size_t got, std::size_t limit)
        : Error("masked query of " + std::to_string(got) +
                " tokens exceeds backend context window of " + std::to_string(limit)),
          token_count(got), context_window(limit) {}
    std::size_t token_count;
    std::size_t context_window;
};
struct InvalidQuery : Error {
    explicit InvalidQuery(const std::string& why) : Error("invalid masked query: " + why) {}
};

// corpus_builder
struct NetworkUnavailable : Error {
    explicit NetworkUnavailable(const std::string& why)
        : Error("network unavailable: " + why) {}
};
struct NoArticlesFound : Error {
    NoArticlesFound() : Error("no articles found for any key phrase") {}
};
struct EmptyCorpus : Error {
    EmptyCorpus() : Error("corpus has no articles") {}
};

// relevance_filter
struct DegenerateDataset : Error {
    explicit DegenerateDataset(const std::string& why)
        : Error("degenerate dataset: " + why) {}
};
struct UnsupportedAlgorithm : Error {
    explicit UnsupportedAlgorithm(const std::string& name)
        : Error("unsupported algorithm: '" + name + "'") {}
};
struct TooFewRows : Error {
    TooFewRows(std::size_t rows, std::size_t folds)
        : Error("dataset of " + std::to_string(rows) + " rows cannot be split into " +
                std::to_string(folds) + " stratified folds") {}
};
struct SchemaMismatch : Error {
    SchemaMismatch(const std::string& want, const std::string& got)
        : Error("feature schema mismatch: model expects '" + want + "', matrix has '" + got + "'") {}
};

// evaluation_harness
struct TooSmall : Error {
    explicit TooSmall(std::size_t n)
        : Error("document with " + std::to_string(n) + " sentences cannot be split") {}
};

// cli / io
struct ConfigError : Error {
    explicit ConfigError(const std::string& why) : Error("config error: " + why) {}
};
struct IoError : Error {
    explicit IoError(const std::string& why) : Error("i/o error: " + why) {}
};

}  // namespace reqterm
