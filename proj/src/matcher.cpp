#include "warden/matcher.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "warden/metrics.hpp"
#include "warden/text.hpp"

namespace warden::matcher {

namespace {

constexpr std::size_t kMinAffixStem = 2;

bool starts_with(const std::vector<char32_t>& word, const std::vector<char32_t>& stem) {
  return stem.size() <= word.size() && std::equal(stem.begin(), stem.end(), word.begin());
}

bool ends_with(const std::vector<char32_t>& word, const std::vector<char32_t>& stem) {
  return stem.size() <= word.size() &&
         std::equal(stem.rbegin(), stem.rend(), word.rbegin());
}

void sort_results(std::vector<MatchResult>& results) {
  std::sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
    return std::tie(a.cer, a.entry_id) < std::tie(b.cer, b.entry_id);
  });
}

}  // namespace

std::string_view match_type_name(MatchType type) {
  return type == MatchType::cer ? "cer" : "affix";
}

double cer_similarity(std::string_view a, std::string_view b) {
  const auto ca = text::to_codepoints(a);
  const auto cb = text::to_codepoints(b);
  const std::size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 0.0;
  const auto edits = metrics::levenshtein(ca, cb);
  return static_cast<double>(edits.distance) / static_cast<double>(longest);
}

std::vector<MatchResult> match_word(std::string_view word, const lexicon::Lexicon& lexicon, int k,
                                    double tau) {
  if (k < 1) {
    throw std::invalid_argument("match_word: k must be at least 1");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("match_word: tau must be in (0, 1]");
  }
  if (lexicon.size() == 0) {
    throw EmptyLexicon("match_word: lexicon has no entries");
  }

  const std::string token = text::nfc(word);
  const auto token_cps = text::to_codepoints(token);

  std::vector<MatchResult> cer_hits;
  std::vector<MatchResult> affix_hits;

  for (const lexicon::LexiconEntry& entry : lexicon.entries()) {
    // best form for the entry; headword first, so ties resolve to it
    double best = 2.0;
    const std::string* best_form = nullptr;
    auto consider = [&](const std::string& form) {
      const double c = cer_similarity(token, form);
      if (c < best) {
        best = c;
        best_form = &form;
      }
    };
    consider(entry.headword);
    for (const std::string& v : entry.variants) consider(v);

    if (best_form != nullptr && best < tau) {
      cer_hits.push_back(MatchResult{token, entry.entry_id, *best_form, best, MatchType::cer});
    }

    if (entry.affix_kind == lexicon::AffixKind::stem) continue;
    const auto head_cps = text::to_codepoints(entry.headword);
    std::vector<char32_t> stem;
    bool positional = false;
    if (entry.affix_kind == lexicon::AffixKind::prefix) {
      stem.assign(head_cps.begin(), head_cps.end() - 1);  // drop trailing hyphen
      positional = stem.size() >= kMinAffixStem && stem.size() < token_cps.size() &&
                   starts_with(token_cps, stem);
    } else {
      stem.assign(head_cps.begin() + 1, head_cps.end());  // drop leading hyphen
      positional = stem.size() >= kMinAffixStem && stem.size() < token_cps.size() &&
                   ends_with(token_cps, stem);
    }
    if (positional) {
      affix_hits.push_back(MatchResult{token, entry.entry_id, entry.headword,
                                       cer_similarity(token, entry.headword), MatchType::affix});
    }
  }

  sort_results(cer_hits);
  if (cer_hits.size() > static_cast<std::size_t>(k)) {
    cer_hits.resize(static_cast<std::size_t>(k));
  }
  sort_results(affix_hits);

  cer_hits.insert(cer_hits.end(), affix_hits.begin(), affix_hits.end());
  return cer_hits;
}

TranscriptMatches match_transcript(std::string_view transcript, const lexicon::Lexicon& lexicon,
                                   int k, double tau) {
  TranscriptMatches out;
  out.transcript = std::string(transcript);

  std::map<std::pair<std::string, MatchType>, std::size_t> flat_index;
  for (const std::string& raw : text::split_tokens(transcript)) {
    const std::string token = text::strip_edge_punctuation(raw);
    if (token.empty()) continue;
    std::vector<MatchResult> results = match_word(token, lexicon, k, tau);
    for (const MatchResult& m : results) {
      const auto key = std::make_pair(m.entry_id, m.match_type);
      const auto it = flat_index.find(key);
      if (it == flat_index.end()) {
        flat_index.emplace(key, out.flattened.size());
        out.flattened.push_back(m);
      } else if (m.cer < out.flattened[it->second].cer) {
        out.flattened[it->second] = m;
      }
    }
    out.per_word.emplace_back(token, std::move(results));
  }
  return out;
}

std::string report_matches(const TranscriptMatches& matches, const lexicon::Lexicon& lexicon) {
  std::string out;
  for (const auto& [token, results] : matches.per_word) {
    for (const MatchResult& m : results) {
      nlohmann::ordered_json j;
      j["token"] = token;
      j["entry_id"] = m.entry_id;
      j["matched_form"] = m.matched_form;
      j["cer"] = text::format_fixed(m.cer, 4);
      j["match_type"] = std::string(match_type_name(m.match_type));
      const lexicon::LexiconEntry* entry = lexicon.find_by_id(m.entry_id);
      j["pos"] = entry == nullptr ? "" : entry->pos;
      j["gloss"] = entry == nullptr ? "" : entry->gloss;
      out += j.dump();
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace warden::matcher
