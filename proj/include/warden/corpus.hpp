#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warden/errors.hpp"

namespace warden::corpus {

// One time-aligned annotation pair extracted from an ELAN tier.
struct Utterance {
  std::string id;
  std::string source_file;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string transcription;
  std::string translation;  // empty when the tier carries no aligned value
};

// A run of adjacent utterances from one file, packed under the model's
// input-duration budget.
struct Sample {
  std::string id;
  std::string source_file;
  std::vector<std::string> utterance_ids;
  std::int64_t span_start_ms = 0;
  std::int64_t span_end_ms = 0;
  std::string transcription;
  std::string translation;
  bool oversize = false;
};

struct CategoryStats {
  double total = 0.0;
  double average = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct CorpusStats {
  CategoryStats audio_seconds;
  CategoryStats transcription_words;
  CategoryStats translation_words;
  std::size_t sample_count = 0;
  std::size_t file_count = 0;
  bool empty = true;
};

enum class Provenance { gold_short, gold_long, predicted_short, predicted_long };

std::string_view provenance_name(Provenance p);
Provenance provenance_from_name(std::string_view name);

struct TrainingPair {
  std::string source;
  std::string target;
  Provenance provenance = Provenance::gold_long;
};

struct AugmentOptions {
  bool include_short = true;
  bool include_long = true;
  bool include_predicted = false;
};

// Greedy left-to-right packing per source file in time order. A sample is
// closed when adding the next utterance would push span_end - span_start
// over max_duration_ms. A lone utterance longer than the budget becomes
// its own sample with oversize set. Texts are joined with single spaces.
std::vector<Sample> concatenate_segments(const std::vector<Utterance>& utterances,
                                         std::int64_t max_duration_ms = 30000);

// Partitions the *files* (and every sample with them) into train/test so no
// file appears on both sides. Deterministic in the seed.
struct Split {
  std::vector<Sample> train;
  std::vector<Sample> test;
};
Split split_by_file(const std::vector<Sample>& samples, double test_fraction, std::uint64_t seed);

CorpusStats corpus_stats(const std::vector<Sample>& samples);

std::string render_stats(const CorpusStats& stats);

// Builds translation training pairs. Long pairs come from samples, short
// pairs from individual utterances; predicted_* variants replace the source
// side with the prediction keyed by sample/utterance id while keeping the
// gold target. Exact duplicates are dropped. Items without a translation
// cannot form a pair and are skipped.
std::vector<TrainingPair> build_training_pairs(
    const std::vector<Sample>& samples, const std::vector<Utterance>& utterances,
    const std::map<std::string, std::string>* predictions, const AugmentOptions& options,
    std::vector<std::string>* skipped_ids = nullptr);

// Line-delimited corpus manifest I/O.
std::string sample_to_json(const Sample& sample);
Sample sample_from_json(std::string_view line);
std::string write_manifest(const std::vector<Sample>& samples);
std::vector<Sample> read_manifest(std::string_view text);

std::string utterance_to_json(const Utterance& u);
Utterance utterance_from_json(std::string_view line);
std::string write_utterances(const std::vector<Utterance>& utterances);
std::vector<Utterance> read_utterances(std::string_view text);

std::string pair_to_json(const TrainingPair& pair);
std::string write_pairs(const std::vector<TrainingPair>& pairs);

}  // namespace warden::corpus
