#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "warden/errors.hpp"

namespace warden::lexicon {

enum class AffixKind { stem, prefix, suffix };

std::string_view affix_kind_name(AffixKind kind);

// Classification from hyphen position: a trailing hyphen marks a prefix
// ("ya-"), a leading hyphen a suffix ("-yi"). Forms with hyphens on both
// ends or none are stems.
AffixKind classify_affix(std::string_view headword);

struct Example {
  std::string source;  // Wardaman
  std::string target;  // English
};

struct LexiconEntry {
  std::string entry_id;
  std::string headword;
  std::string pos;
  std::string gloss;
  std::vector<std::string> variants;
  std::vector<Example> examples;
  AffixKind affix_kind = AffixKind::stem;
};

enum class Format { csv, json_lines };

class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<LexiconEntry> entries);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Entries whose headword or any variant equals the normalized form.
  std::vector<const LexiconEntry*> lookup_exact(std::string_view form) const;

  // Entry with the given id, or nullptr.
  const LexiconEntry* find_by_id(std::string_view entry_id) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::map<std::string, std::vector<std::size_t>> by_form_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

// Parses CSV (columns headword, gloss, optional pos/variants/examples;
// variants pipe-separated, examples "src => tgt" pipe-separated) or
// line-delimited JSON records with the same fields. Entries are trimmed and
// NFC-normalized; duplicate headwords are kept as separate entries. When
// `warnings` is given, records whose pos contradicts the hyphen
// classification are reported there.
Lexicon parse_lexicon(std::string_view table, Format format,
                      std::vector<std::string>* warnings = nullptr);

// Normalized dump, ordered by headword then entry_id. parse(dump(x))
// reproduces x.
std::string dump_lexicon(const Lexicon& lexicon);

}  // namespace warden::lexicon
