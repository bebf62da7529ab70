#pragma once

#include <stdexcept>
#include <string>

namespace warden {

// Base class for all toolkit errors so callers can catch the whole family.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// corpus / eaf
struct MalformedDocument : Error {
  using Error::Error;
};
struct MissingTier : Error {
  using Error::Error;
};
struct UnresolvedTimeSlot : Error {
  using Error::Error;
};
struct InsufficientFiles : Error {
  using Error::Error;
};
struct MissingPredictions : Error {
  using Error::Error;
};

// phonology
struct MissingColumn : Error {
  using Error::Error;
};
struct EmptyTable : Error {
  using Error::Error;
};
struct UnknownSegment : Error {
  using Error::Error;
};
struct UnknownLanguage : Error {
  using Error::Error;
};

// shared by phonology (bit vectors) and metrics (parallel corpora)
struct LengthMismatch : Error {
  using Error::Error;
};

// lexicon
struct MissingField : Error {
  using Error::Error;
};
struct MalformedRecord : Error {
  using Error::Error;
};

// matcher
struct EmptyLexicon : Error {
  using Error::Error;
};

// prompting
struct InsufficientExemplars : Error {
  using Error::Error;
};

// metrics
struct EmptyReference : Error {
  using Error::Error;
};
struct EmptyCorpus : Error {
  using Error::Error;
};

// pipeline clients
struct ClientUnavailable : Error {
  using Error::Error;
};

}  // namespace warden
