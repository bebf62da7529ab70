#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "warden/errors.hpp"
#include "warden/lexicon.hpp"
#include "warden/matcher.hpp"

namespace warden::prompting {

// Fixed system instruction for lexicon-conditioned translation. Golden tests
// pin this byte for byte — do not reflow.
inline constexpr std::string_view kSystemPrompt =
    "Please translate the following Wardaman sentence into English, using the provided "
    "lexicons. Each lexicon entry is given in the form of word (character error rate), "
    "part of speech, and gloss.";

// Instruction-only variant used by the few-shot comparison baseline.
inline constexpr std::string_view kFewshotSystemPrompt =
    "Please translate the following Wardaman sentence into English.";

struct PromptBundle {
  std::string system;
  std::string user;
  std::size_t token_estimate = 0;  // whitespace tokens over system + user; an estimate only
};

// `<form> (<cer to 2 decimals>), <pos>, <gloss>`; empty pos renders "unk".
std::string format_entry(const matcher::MatchResult& m, const lexicon::LexiconEntry& entry);

// User prompt `Transcription: <transcript>. Lexicon entries: <e1; e2; ...>`
// over the flattened matches in order, or "none" when there are none. The
// lexicon resolves entry ids to pos/gloss for formatting.
PromptBundle build_prompt(std::string_view transcript, const matcher::TranscriptMatches& matches,
                          const lexicon::Lexicon& lexicon);

// In-context baseline: n exemplar pairs as Wardaman/English lines, then the
// transcript. Throws InsufficientExemplars when fewer than n are supplied.
PromptBundle build_fewshot_prompt(std::string_view transcript,
                                  const std::vector<std::pair<std::string, std::string>>& exemplars,
                                  std::size_t n);

// {system, user} records, one JSON object per line, for batch submission.
std::string bundles_to_jsonl(const std::vector<PromptBundle>& bundles);

}  // namespace warden::prompting
