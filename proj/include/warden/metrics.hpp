#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "warden/errors.hpp"

namespace warden::metrics {

struct EditCounts {
  std::int64_t distance = 0;
  std::int64_t substitutions = 0;
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t reference_length = 0;
};

// Minimal unit-cost edit distance from `reference` to `hypothesis` with a
// substitution/insertion/deletion decomposition consistent with the
// distance. Ties are broken substitution, then deletion, then insertion,
// so the decomposition is deterministic.
template <typename T>
EditCounts levenshtein(const std::vector<T>& reference, const std::vector<T>& hypothesis);

extern template EditCounts levenshtein<std::string>(const std::vector<std::string>&,
                                                    const std::vector<std::string>&);
extern template EditCounts levenshtein<char32_t>(const std::vector<char32_t>&,
                                                 const std::vector<char32_t>&);
extern template EditCounts levenshtein<char>(const std::vector<char>&, const std::vector<char>&);
extern template EditCounts levenshtein<int>(const std::vector<int>&, const std::vector<int>&);

// Word error rate: word-level edit distance over the reference token
// count. Both sides are normalized (lowercased, punctuation removed,
// whitespace collapsed) before tokenization. May exceed 1.
double wer(std::string_view reference, std::string_view hypothesis);
EditCounts wer_counts(std::string_view reference, std::string_view hypothesis);

// Evaluation-form character error rate: character-level edit distance over
// the reference character count, computed with spaces removed after the
// same normalization as wer().
double cer_eval(std::string_view reference, std::string_view hypothesis);
EditCounts cer_eval_counts(std::string_view reference, std::string_view hypothesis);

struct BleuDetail {
  double bleu = 0.0;
  std::array<double, 4> precisions{};
  double brevity_penalty = 1.0;
  std::int64_t hypothesis_tokens = 0;
  std::int64_t reference_tokens = 0;
};

// Corpus-level BLEU-4 with one reference per hypothesis. Clipped n-gram
// counts are summed over the corpus; brevity penalty exp(1 - r/c) when
// c < r; a zero n-gram precision is floored at 1/(2 * total hypothesis
// tokens); uniform-weight geometric mean.
double bleu4(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses);
BleuDetail bleu4_detail(const std::vector<std::string>& references,
                        const std::vector<std::string>& hypotheses);

struct EvalReport {
  double wer = 0.0;
  double cer = 0.0;
  double bleu4 = 0.0;
  EditCounts wer_counts;
  EditCounts cer_counts;
  std::size_t sample_count = 0;
  bool partial = false;
  std::vector<std::string> failed_ids;
};

// Corpus-level report: edit counts are pooled (total edits over total
// reference length) rather than averaging per-sentence rates.
EvalReport corpus_report(const std::vector<std::string>& references,
                         const std::vector<std::string>& hypotheses);

// Aligned, human-readable rendering of a report (4-decimal rates plus
// substitution/insertion/deletion counts).
std::string render_report(const EvalReport& report);

}  // namespace warden::metrics
