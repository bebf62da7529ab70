#pragma once

#include <map>
#include <string>
#include <vector>

#include "warden/clients.hpp"
#include "warden/corpus.hpp"
#include "warden/errors.hpp"
#include "warden/lexicon.hpp"
#include "warden/metrics.hpp"
#include "warden/prompting.hpp"

namespace warden::pipeline {

struct RunOptions {
  int max_in_flight = 4;       // bound on concurrent client requests
  std::string run_dir;         // when non-empty, records + manifest are written here
  std::string language_token = "<su>";  // decoder tag forwarded to the transcriber
  std::string endpoint_label;  // recorded in the run manifest for audit
  // Optional ASR outputs keyed by sample id; when set, translation runs use
  // these as transcripts instead of the gold transcription. Samples without
  // a prediction are recorded as failures.
  const std::map<std::string, std::string>* predictions = nullptr;
};

// One line of the persisted run record.
struct SampleRecord {
  std::string sample_id;
  std::string system;        // empty for transcription runs
  std::string user;          // prompt for translation runs, audio ref otherwise
  std::string output;
  double wer = 0.0;
  double cer = 0.0;
  bool failed = false;
  std::string error;
};

// For each test sample: match_transcript -> build_prompt -> translate, then
// corpus metrics of the outputs against the gold translations. Per-sample
// client errors mark the report partial; if every sample fails the run
// throws ClientUnavailable.
metrics::EvalReport run_translation_eval(const std::vector<corpus::Sample>& samples,
                                         const lexicon::Lexicon& lexicon, double tau, int k,
                                         clients::TranslatorClient& translator,
                                         const RunOptions& options = {},
                                         std::vector<SampleRecord>* records = nullptr);

// Per-sample transcribe (audio ref = sample id) scored against the gold
// transcription. Same partial-failure semantics as translation runs.
metrics::EvalReport run_transcription_eval(const std::vector<corpus::Sample>& samples,
                                           clients::TranscriberClient& transcriber,
                                           const RunOptions& options = {},
                                           std::vector<SampleRecord>* records = nullptr);

struct GridCell {
  double tau = 0.0;
  int k = 0;
  bool failed = false;
  std::string error;
  metrics::EvalReport report;
};

struct GridResult {
  std::vector<double> taus;  // row labels
  std::vector<int> ks;       // column labels
  std::vector<GridCell> cells;  // row-major: taus.size() x ks.size()
  bool has_best = false;
  double best_tau = 0.0;
  int best_k = 0;
  double best_bleu = 0.0;

  const GridCell& cell(std::size_t tau_index, std::size_t k_index) const {
    return cells[tau_index * ks.size() + k_index];
  }
};

// One run_translation_eval per (tau, k) cell over the full grid. A failed
// cell is marked, never silently zeroed. Best cell maximizes BLEU-4 with
// ties broken by smaller tau, then smaller k.
GridResult grid_search(const std::vector<corpus::Sample>& samples,
                       const lexicon::Lexicon& lexicon, const std::vector<double>& taus,
                       const std::vector<int>& ks, clients::TranslatorClient& translator,
                       const RunOptions& options = {});

// Rows = thresholds, columns = k values, cells = BLEU-4 to 4 decimals.
std::string render_grid(const GridResult& grid);
std::string grid_to_json(const GridResult& grid);

std::string record_to_json(const SampleRecord& record);
SampleRecord record_from_json(std::string_view line);

}  // namespace warden::pipeline
