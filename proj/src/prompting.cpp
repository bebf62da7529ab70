#include "warden/prompting.hpp"

#include <json.hpp>

#include "warden/text.hpp"

namespace warden::prompting {

namespace {

std::size_t estimate_tokens(const PromptBundle& bundle) {
  return text::count_tokens(bundle.system) + text::count_tokens(bundle.user);
}

}  // namespace

std::string format_entry(const matcher::MatchResult& m, const lexicon::LexiconEntry& entry) {
  std::string out = m.matched_form;
  out += " (";
  out += text::format_fixed(m.cer, 2);
  out += "), ";
  out += entry.pos.empty() ? "unk" : entry.pos;
  out += ", ";
  out += entry.gloss;
  return out;
}

PromptBundle build_prompt(std::string_view transcript, const matcher::TranscriptMatches& matches,
                          const lexicon::Lexicon& lexicon) {
  PromptBundle bundle;
  bundle.system = kSystemPrompt;
  bundle.user = "Transcription: ";
  bundle.user += transcript;
  bundle.user += ". Lexicon entries: ";
  if (matches.flattened.empty()) {
    bundle.user += "none";
  } else {
    bool first = true;
    for (const matcher::MatchResult& m : matches.flattened) {
      const lexicon::LexiconEntry* entry = lexicon.find_by_id(m.entry_id);
      if (entry == nullptr) continue;  // stale id; skip rather than fabricate
      if (!first) bundle.user += "; ";
      bundle.user += format_entry(m, *entry);
      first = false;
    }
    if (first) bundle.user += "none";
  }
  bundle.token_estimate = estimate_tokens(bundle);
  return bundle;
}

PromptBundle build_fewshot_prompt(std::string_view transcript,
                                  const std::vector<std::pair<std::string, std::string>>& exemplars,
                                  std::size_t n) {
  if (exemplars.size() < n) {
    throw InsufficientExemplars("requested " + std::to_string(n) + " exemplars but only " +
                                std::to_string(exemplars.size()) + " supplied");
  }
  PromptBundle bundle;
  bundle.system = kFewshotSystemPrompt;
  for (std::size_t i = 0; i < n; ++i) {
    bundle.user += "Wardaman: ";
    bundle.user += exemplars[i].first;
    bundle.user += "\nEnglish: ";
    bundle.user += exemplars[i].second;
    bundle.user += "\n";
  }
  bundle.user += "Transcription: ";
  bundle.user += transcript;
  bundle.token_estimate = estimate_tokens(bundle);
  return bundle;
}

std::string bundles_to_jsonl(const std::vector<PromptBundle>& bundles) {
  std::string out;
  for (const PromptBundle& b : bundles) {
    nlohmann::ordered_json j;
    j["system"] = b.system;
    j["user"] = b.user;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace warden::prompting
