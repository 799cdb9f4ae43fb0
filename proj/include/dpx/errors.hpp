#pragma once

#include <stdexcept>
#include <string>

namespace dpx {

// Base class for all error conditions raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- corpus ---
struct MissingFrontMatter : Error {
    using Error::Error;
};
struct MalformedTable : Error {
    MalformedTable(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};
struct EmptyDocument : Error {
    using Error::Error;
};
struct DuplicateDocId : Error {
    using Error::Error;
};
struct DuplicateAlias : Error {
    using Error::Error;
};

// --- retrieval ---
struct EmptyCorpus : Error {
    using Error::Error;
};

// --- backend ---
struct BackendError : Error {
    using Error::Error;
};
struct Timeout : BackendError {
    using BackendError::BackendError;
};
struct TransportError : BackendError {
    using BackendError::BackendError;
};
struct RateLimited : BackendError {
    RateLimited(const std::string& msg, double retry_after_s)
        : BackendError(msg), retry_after_seconds(retry_after_s) {}
    double retry_after_seconds;
};
struct PromptTooLong : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

// --- devicegen ---
struct ZeroCurrent : Error {
    using Error::Error;
};
struct MissingRequiredParameter : Error {
    MissingRequiredParameter(const std::string& symbol, const std::string& family)
        : Error("missing required parameter " + symbol + " for family " + family),
          symbol(symbol) {}
    std::string symbol;
};
struct UnknownFamily : Error {
    using Error::Error;
};

// --- eval ---
struct NoExtractions : Error {
    using Error::Error;
};
struct EmptyList : Error {
    using Error::Error;
};
struct InsufficientSamples : Error {
    using Error::Error;
};
struct ZeroPooledSD : Error {
    using Error::Error;
};
struct ZeroBaseline : Error {
    using Error::Error;
};

}  // namespace dpx
