#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "warden/lexicon.hpp"

namespace warden::matcher {

enum class MatchType { cer, affix };

std::string_view match_type_name(MatchType type);

struct MatchResult {
  std::string word;          // transcript token the match was computed for
  std::string entry_id;
  std::string matched_form;  // headword or variant that scored
  double cer = 0.0;
  MatchType match_type = MatchType::cer;
};

// Bounded, symmetric string similarity: edit distance over code points
// divided by max(|a|, |b|); 0 when both strings are empty.
double cer_similarity(std::string_view a, std::string_view b);

// CER retrieval against every headword and variant: per-entry best form,
// candidates with cer < tau sorted ascending (ties by entry_id), truncated
// to k. Positional affix hits follow, ignoring the threshold and not
// counting against k: a prefix entry matches when its stem (at least two
// characters) starts the word, a suffix entry when its stem ends it, in
// both cases as a proper substring.
std::vector<MatchResult> match_word(std::string_view word, const lexicon::Lexicon& lexicon, int k,
                                    double tau);

struct TranscriptMatches {
  std::string transcript;
  std::vector<std::pair<std::string, std::vector<MatchResult>>> per_word;
  std::vector<MatchResult> flattened;  // deduplicated, first-occurrence order
};

// Whitespace tokenization with edge punctuation stripped; flattened keeps
// the lowest-CER occurrence of each (entry_id, match_type) pair at its
// first position.
TranscriptMatches match_transcript(std::string_view transcript, const lexicon::Lexicon& lexicon,
                                   int k, double tau);

// Line-delimited match report with entry details resolved.
std::string report_matches(const TranscriptMatches& matches, const lexicon::Lexicon& lexicon);

}  // namespace warden::matcher
