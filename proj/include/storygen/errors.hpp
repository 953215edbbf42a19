#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace storygen {

// Base for every domain error the library raises. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- grammar ---------------------------------------------------------------

struct SourcePosition {
    std::string rule;          // empty for document-level errors
    std::size_t alternative = 0;
    std::size_t offset = 0;    // byte offset into the alternative (or document)
};

class ParseError : public Error {
public:
    ParseError(SourcePosition pos, const std::string& message);
    const SourcePosition& position() const noexcept { return pos_; }

private:
    SourcePosition pos_;
};

class DanglingSymbol : public Error {
public:
    explicit DanglingSymbol(std::vector<std::string> names);
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class DepthExceeded : public Error {
public:
    using Error::Error;
};

class InvalidMapping : public Error {
public:
    using Error::Error;
};

class UnknownTag : public Error {
public:
    explicit UnknownTag(const std::string& tag)
        : Error("unknown tag '" + tag + "' (absent from compatibility table)"), tag_(tag) {}
    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

// ---- worldgen --------------------------------------------------------------

class OutOfRange : public Error {
public:
    using Error::Error;
};

class Uncovered : public Error {
public:
    using Error::Error;
};

class NoPassableCell : public Error {
public:
    using Error::Error;
};

// ---- embeddings ------------------------------------------------------------

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public FormatError {
public:
    using FormatError::FormatError;
};

// ---- evolver ---------------------------------------------------------------

class Unevaluated : public Error {
public:
    using Error::Error;
};

class TooFew : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class EmptyArchive : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// ---- bundle / io -----------------------------------------------------------

class MissingGrammarForTag : public Error {
public:
    explicit MissingGrammarForTag(const std::string& tag)
        : Error("world contains tag '" + tag + "' but no grammar was provided for it"), tag_(tag) {}
    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace storygen
