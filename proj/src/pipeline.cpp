#include "warden/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "warden/io.hpp"
#include "warden/matcher.hpp"
#include "warden/text.hpp"

namespace warden::pipeline {

namespace {

using ordered_json = nlohmann::ordered_json;

// Runs fn(0..n-1) on up to max_in_flight worker threads. Each index owns its
// own output slot, so results are independent of scheduling; fn must not
// throw (workers capture errors into their slot).
void for_each_concurrent(std::size_t n, int max_in_flight,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(n, static_cast<std::size_t>(std::max(1, max_in_flight)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

bool scoreable(std::string_view gold) {
  return text::count_tokens(text::normalize_for_scoring(gold)) > 0;
}

void score_record(SampleRecord& record, const std::string& gold) {
  record.wer = metrics::wer(gold, record.output);
  record.cer = metrics::cer_eval(gold, record.output);
}

// Aggregates slot results in index order, independent of completion order.
metrics::EvalReport finish_report(const std::vector<corpus::Sample>& samples,
                                  std::vector<SampleRecord>& records, bool translation) {
  std::vector<std::string> refs;
  std::vector<std::string> hyps;
  metrics::EvalReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].failed) {
      report.partial = true;
      report.failed_ids.push_back(records[i].sample_id);
      continue;
    }
    refs.push_back(translation ? samples[i].translation : samples[i].transcription);
    hyps.push_back(records[i].output);
  }
  if (!records.empty() && refs.empty()) {
    throw ClientUnavailable("all " + std::to_string(records.size()) +
                            " samples failed; first error: " + records.front().error);
  }
  const bool partial = report.partial;
  auto failed_ids = std::move(report.failed_ids);
  report = metrics::corpus_report(refs, hyps);
  report.partial = partial;
  report.failed_ids = std::move(failed_ids);
  return report;
}

void persist_run(const std::string& run_dir, const std::string& kind, double tau, int k,
                 const RunOptions& options, const std::vector<SampleRecord>& records,
                 const metrics::EvalReport& report) {
  std::string lines;
  for (const SampleRecord& r : records) {
    lines += record_to_json(r);
    lines.push_back('\n');
  }
  io::write_file(run_dir + "/records.jsonl", lines);

  ordered_json manifest;
  manifest["kind"] = kind;
  if (kind == "translation") {
    manifest["tau"] = text::format_fixed(tau, 2);
    manifest["k"] = k;
  } else {
    manifest["language_token"] = options.language_token;
  }
  manifest["max_in_flight"] = options.max_in_flight;
  if (!options.endpoint_label.empty()) manifest["endpoint"] = options.endpoint_label;
  manifest["sample_count"] = records.size();
  manifest["uses_predictions"] = options.predictions != nullptr;
  io::write_file(run_dir + "/manifest.json", manifest.dump(2) + "\n");

  ordered_json summary;
  summary["wer"] = report.wer;
  summary["cer"] = report.cer;
  summary["bleu4"] = report.bleu4;
  summary["scored"] = report.sample_count;
  summary["partial"] = report.partial;
  summary["failed_ids"] = report.failed_ids;
  io::write_file(run_dir + "/report.json", summary.dump(2) + "\n");
}

}  // namespace

metrics::EvalReport run_translation_eval(const std::vector<corpus::Sample>& samples,
                                         const lexicon::Lexicon& lexicon, double tau, int k,
                                         clients::TranslatorClient& translator,
                                         const RunOptions& options,
                                         std::vector<SampleRecord>* records) {
  if (k < 1) throw std::invalid_argument("run_translation_eval: k must be at least 1");
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("run_translation_eval: tau must be in (0, 1]");
  }
  if (lexicon.size() == 0) throw EmptyLexicon("run_translation_eval: lexicon has no entries");

  std::vector<SampleRecord> local(samples.size());
  for_each_concurrent(samples.size(), options.max_in_flight, [&](std::size_t i) {
    SampleRecord& record = local[i];
    const corpus::Sample& sample = samples[i];
    record.sample_id = sample.id;
    std::string transcript = sample.transcription;
    if (options.predictions != nullptr) {
      const auto it = options.predictions->find(sample.id);
      if (it == options.predictions->end()) {
        record.failed = true;
        record.error = "no prediction for sample";
        return;
      }
      transcript = it->second;
    }
    if (!scoreable(sample.translation)) {
      record.failed = true;
      record.error = "sample has no scoreable gold translation";
      return;
    }
    try {
      const matcher::TranscriptMatches matches =
          matcher::match_transcript(transcript, lexicon, k, tau);
      const prompting::PromptBundle bundle = prompting::build_prompt(transcript, matches, lexicon);
      record.system = bundle.system;
      record.user = bundle.user;
      record.output = translator.translate(bundle);
      score_record(record, sample.translation);
    } catch (const std::exception& e) {
      record.failed = true;
      record.error = e.what();
    }
  });

  metrics::EvalReport report = finish_report(samples, local, /*translation=*/true);
  if (!options.run_dir.empty()) {
    persist_run(options.run_dir, "translation", tau, k, options, local, report);
  }
  if (records != nullptr) *records = std::move(local);
  return report;
}

metrics::EvalReport run_transcription_eval(const std::vector<corpus::Sample>& samples,
                                           clients::TranscriberClient& transcriber,
                                           const RunOptions& options,
                                           std::vector<SampleRecord>* records) {
  std::vector<SampleRecord> local(samples.size());
  for_each_concurrent(samples.size(), options.max_in_flight, [&](std::size_t i) {
    SampleRecord& record = local[i];
    const corpus::Sample& sample = samples[i];
    record.sample_id = sample.id;
    record.user = sample.id;  // audio reference: the service resolves corpus ids
    if (!scoreable(sample.transcription)) {
      record.failed = true;
      record.error = "sample has no scoreable gold transcription";
      return;
    }
    try {
      record.output = transcriber.transcribe(sample.id, options.language_token);
      score_record(record, sample.transcription);
    } catch (const std::exception& e) {
      record.failed = true;
      record.error = e.what();
    }
  });

  metrics::EvalReport report = finish_report(samples, local, /*translation=*/false);
  if (!options.run_dir.empty()) {
    persist_run(options.run_dir, "transcription", 0.0, 0, options, local, report);
  }
  if (records != nullptr) *records = std::move(local);
  return report;
}

GridResult grid_search(const std::vector<corpus::Sample>& samples,
                       const lexicon::Lexicon& lexicon, const std::vector<double>& taus,
                       const std::vector<int>& ks, clients::TranslatorClient& translator,
                       const RunOptions& options) {
  if (taus.empty() || ks.empty()) {
    throw std::invalid_argument("grid_search: taus and ks must be non-empty");
  }
  GridResult grid;
  grid.taus = taus;
  grid.ks = ks;
  grid.cells.resize(taus.size() * ks.size());

  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      GridCell& cell = grid.cells[ti * ks.size() + ki];
      cell.tau = taus[ti];
      cell.k = ks[ki];
      RunOptions cell_options = options;
      if (!options.run_dir.empty()) {
        cell_options.run_dir = options.run_dir + "/cell_t" + text::format_fixed(cell.tau, 2) +
                               "_k" + std::to_string(cell.k);
      }
      try {
        cell.report =
            run_translation_eval(samples, lexicon, cell.tau, cell.k, translator, cell_options);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
    }
  }

  for (const GridCell& cell : grid.cells) {
    if (cell.failed) continue;
    const bool better =
        !grid.has_best || cell.report.bleu4 > grid.best_bleu ||
        (cell.report.bleu4 == grid.best_bleu &&
         std::tie(cell.tau, cell.k) < std::tie(grid.best_tau, grid.best_k));
    if (better) {
      grid.has_best = true;
      grid.best_tau = cell.tau;
      grid.best_k = cell.k;
      grid.best_bleu = cell.report.bleu4;
    }
  }

  if (!options.run_dir.empty()) {
    io::write_file(options.run_dir + "/grid.json", grid_to_json(grid));
    io::write_file(options.run_dir + "/grid.txt", render_grid(grid));
  }
  return grid;
}

std::string render_grid(const GridResult& grid) {
  std::string out = "tau\\k";
  out.insert(0, 8 - out.size(), ' ');
  for (int k : grid.ks) {
    std::string label = std::to_string(k);
    out += std::string(9 - label.size(), ' ') + label;
  }
  out.push_back('\n');
  for (std::size_t ti = 0; ti < grid.taus.size(); ++ti) {
    std::string row = text::format_fixed(grid.taus[ti], 2);
    row.insert(0, 8 - row.size(), ' ');
    for (std::size_t ki = 0; ki < grid.ks.size(); ++ki) {
      const GridCell& cell = grid.cell(ti, ki);
      const std::string value = cell.failed ? "failed" : text::format_fixed(cell.report.bleu4, 4);
      row += std::string(9 - value.size(), ' ') + value;
    }
    out += row;
    out.push_back('\n');
  }
  if (grid.has_best) {
    out += "best: tau=" + text::format_fixed(grid.best_tau, 2) + " k=" +
           std::to_string(grid.best_k) + " bleu4=" + text::format_fixed(grid.best_bleu, 4) + "\n";
  }
  return out;
}

std::string grid_to_json(const GridResult& grid) {
  ordered_json j;
  j["taus"] = ordered_json::array();
  for (double t : grid.taus) j["taus"].push_back(text::format_fixed(t, 2));
  j["ks"] = grid.ks;
  j["cells"] = ordered_json::array();
  for (std::size_t ti = 0; ti < grid.taus.size(); ++ti) {
    ordered_json row = ordered_json::array();
    for (std::size_t ki = 0; ki < grid.ks.size(); ++ki) {
      const GridCell& cell = grid.cell(ti, ki);
      ordered_json c;
      c["tau"] = text::format_fixed(cell.tau, 2);
      c["k"] = cell.k;
      if (cell.failed) {
        c["failed"] = true;
        c["error"] = cell.error;
      } else {
        c["bleu4"] = text::format_fixed(cell.report.bleu4, 4);
        c["wer"] = text::format_fixed(cell.report.wer, 4);
        c["cer"] = text::format_fixed(cell.report.cer, 4);
        c["partial"] = cell.report.partial;
      }
      row.push_back(std::move(c));
    }
    j["cells"].push_back(std::move(row));
  }
  if (grid.has_best) {
    ordered_json best;
    best["tau"] = text::format_fixed(grid.best_tau, 2);
    best["k"] = grid.best_k;
    best["bleu4"] = text::format_fixed(grid.best_bleu, 4);
    j["best"] = std::move(best);
  } else {
    j["best"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string record_to_json(const SampleRecord& record) {
  ordered_json j;
  j["sample_id"] = record.sample_id;
  j["system"] = record.system;
  j["user"] = record.user;
  j["output"] = record.output;
  j["wer"] = text::format_fixed(record.wer, 6);
  j["cer"] = text::format_fixed(record.cer, 6);
  j["failed"] = record.failed;
  j["error"] = record.error;
  return j.dump();
}

SampleRecord record_from_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedRecord("bad run record: " + std::string(line.substr(0, 120)));
  }
  SampleRecord record;
  try {
    record.sample_id = j.at("sample_id").get<std::string>();
    record.system = j.value("system", std::string());
    record.user = j.value("user", std::string());
    record.output = j.value("output", std::string());
    record.wer = std::stod(j.value("wer", std::string("0")));
    record.cer = std::stod(j.value("cer", std::string("0")));
    record.failed = j.value("failed", false);
    record.error = j.value("error", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(std::string("bad run record: ") + e.what());
  }
  return record;
}

}  // namespace warden::pipeline
