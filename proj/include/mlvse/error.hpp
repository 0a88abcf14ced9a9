#pragma once

#include <stdexcept>
#include <string>

namespace mlvse {

// Base for every error raised by the library. The CLI maps configuration,
// parse, incompatibility and unknown-language errors to exit code 2 and
// everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A row collapsed to (near) zero norm, or an empty caption reached an encoder.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class UnknownLanguageError : public Error {
 public:
  using Error::Error;
};

class MissingCaptionError : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class IncompatibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlvse
