// warden: command-line front end over the pipeline library. One subcommand
// per stage; runs are reproducible from flags, an optional flat key=value
// config file (explicit flags win), and WARDEN_* environment variables.
//
// Exit codes: 0 success, 1 usage or operational error, 2 partial failure
// (a run completed but some samples or grid cells failed).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "warden/clients.hpp"
#include "warden/corpus.hpp"
#include "warden/eaf.hpp"
#include "warden/errors.hpp"
#include "warden/io.hpp"
#include "warden/lexicon.hpp"
#include "warden/matcher.hpp"
#include "warden/metrics.hpp"
#include "warden/phonology.hpp"
#include "warden/pipeline.hpp"
#include "warden/prompting.hpp"
#include "warden/text.hpp"

namespace {

namespace fs = std::filesystem;
using namespace warden;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kPartial = 2;

std::vector<corpus::Sample> load_manifest(const std::string& path) {
  return corpus::read_manifest(io::read_file(path));
}

std::vector<corpus::Utterance> load_utterances(const std::string& path) {
  return corpus::read_utterances(io::read_file(path));
}

// format "auto" decides by extension; anything not named .csv is treated as
// line-delimited JSON
lexicon::Lexicon load_lexicon(const std::string& path, const std::string& format) {
  lexicon::Format f;
  if (format == "csv") {
    f = lexicon::Format::csv;
  } else if (format == "jsonl") {
    f = lexicon::Format::json_lines;
  } else {
    f = fs::path(path).extension() == ".csv" ? lexicon::Format::csv : lexicon::Format::json_lines;
  }
  std::vector<std::string> warnings;
  lexicon::Lexicon lex = lexicon::parse_lexicon(io::read_file(path), f, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return lex;
}

// predictions file: one JSON object mapping sample/utterance id -> text
std::map<std::string, std::string> load_predictions(const std::string& path) {
  const auto parsed = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw MalformedRecord("predictions file is not a JSON object: " + path);
  }
  std::map<std::string, std::string> out;
  for (const auto& [id, text] : parsed.items()) {
    if (!text.is_string()) {
      throw MalformedRecord("prediction for " + id + " is not a string");
    }
    out[id] = text.get<std::string>();
  }
  return out;
}

// mocks answer from the corpus' own gold text; HTTP endpoints ignore this
clients::MockGold gold_from(const std::vector<corpus::Sample>& samples) {
  clients::MockGold gold;
  for (const corpus::Sample& s : samples) {
    gold.transcription_by_audio[s.id] = s.transcription;
    gold.translation_by_transcript[s.transcription] = s.translation;
  }
  return gold;
}

// shared service flags for eval-asr / eval-mt / grid
struct ServiceFlags {
  std::string endpoint;
  std::string model;
  std::string api_key;
  int timeout_seconds = 120;
  int max_retries = 3;
  int max_in_flight = 4;
  std::string run_dir;

  clients::HttpOptions http() const {
    clients::HttpOptions options;
    options.model = model;
    options.api_key = api_key;
    options.timeout_seconds = timeout_seconds;
    options.max_retries = max_retries;
    return options;
  }
  pipeline::RunOptions run(const std::string& cmd_run_dir) const {
    pipeline::RunOptions options;
    options.max_in_flight = max_in_flight;
    options.run_dir = cmd_run_dir;
    options.endpoint_label = endpoint;
    return options;
  }
};

void add_service_flags(CLI::App* cmd, ServiceFlags& flags, const std::string& flag_name,
                       const std::string& env_name) {
  cmd->add_option("--" + flag_name, flags.endpoint,
                  "service URL or mock:echo | mock:gloss | mock:noise:<rate>")
      ->envname(env_name)
      ->required();
  cmd->add_option("--model", flags.model, "model name forwarded in request bodies");
  cmd->add_option("--api-key", flags.api_key, "bearer token for the service")
      ->envname("WARDEN_API_KEY");
  cmd->add_option("--timeout", flags.timeout_seconds, "per-request timeout in seconds")
      ->capture_default_str();
  cmd->add_option("--retries", flags.max_retries, "retries after the first attempt")
      ->capture_default_str();
  cmd->add_option("--max-in-flight", flags.max_in_flight, "concurrent request limit")
      ->capture_default_str();
  cmd->add_option("--run-dir", flags.run_dir, "directory for records + manifest + report");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_file(out_path, text);
  }
}

int finish_eval(const metrics::EvalReport& report) {
  std::cout << metrics::render_report(report);
  return report.partial ? kPartial : kOk;
}

// Flat key=value config support. CLI11 reads config files only on the app
// it parses, not on subcommands, so the file is expanded into --key=value
// tokens up front. Keys whose flag already appears on the command line are
// skipped; that is what makes explicit flags win. args[0] is the
// subcommand name and is never touched.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      ++i;
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;

  std::vector<std::string> out = args;
  std::istringstream lines(io::read_file(config_path));
  std::size_t line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    const std::string entry = text::trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw MalformedRecord("config line " + std::to_string(line_no) + " has no '=': " + entry);
    }
    const std::string key = text::trim(entry.substr(0, eq));
    const std::string value = text::trim(entry.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw MalformedRecord("config line " + std::to_string(line_no) + " has a bad key");
    }
    const std::string flag = "--" + key;
    bool given = false;
    for (std::size_t i = 1; i < args.size() && !given; ++i) {
      given = args[i] == flag || args[i].rfind(flag + "=", 0) == 0;
    }
    if (!given) out.push_back(flag + "=" + value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wardaman speech-translation pipeline toolkit"};
  app.name("warden");  // parse() below sees argv[0] stripped
  app.require_subcommand(1);

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "parse .eaf files into a segmented corpus manifest");
  ingest->add_option("--config", "flat key=value config file; explicit flags win");
  std::string ingest_corpus, ingest_out;
  std::string transcription_tier = "transcription";
  std::string translation_tier = "translation";
  std::int64_t max_duration_ms = 30000;
  ingest->add_option("--corpus", ingest_corpus, "directory of .eaf files")->required();
  ingest->add_option("--out", ingest_out, "output directory")->required();
  ingest->add_option("--transcription-tier", transcription_tier, "transcription tier name")
      ->capture_default_str();
  ingest->add_option("--translation-tier", translation_tier, "translation tier name")
      ->capture_default_str();
  ingest->add_option("--max-duration-ms", max_duration_ms, "sample span budget")
      ->capture_default_str();

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "corpus statistics for an existing manifest");
  stats->add_option("--config", "flat key=value config file; explicit flags win");
  std::string stats_manifest, stats_lexicon, stats_lexicon_format = "auto";
  stats->add_option("--manifest", stats_manifest, "corpus manifest (.jsonl)")->required();
  stats->add_option("--lexicon", stats_lexicon, "also report lexicon coverage of the vocabulary");
  stats->add_option("--lexicon-format", stats_lexicon_format, "csv | jsonl | auto")
      ->capture_default_str();

  // ---- split ----
  auto* split = app.add_subcommand("split", "file-level train/test split of a manifest");
  split->add_option("--config", "flat key=value config file; explicit flags win");
  std::string split_manifest, split_out;
  double test_fraction = 0.1;
  std::uint64_t seed = 7;
  split->add_option("--manifest", split_manifest, "corpus manifest (.jsonl)")->required();
  split->add_option("--out", split_out, "output directory for train.jsonl / test.jsonl")
      ->required();
  split->add_option("--test-fraction", test_fraction, "fraction of files held out")
      ->capture_default_str();
  split->add_option("--seed", seed, "shuffle seed")->capture_default_str();

  // ---- proxy-rank ----
  auto* proxy = app.add_subcommand("proxy-rank", "rank proxy languages by phoneme distance");
  proxy->add_option("--config", "flat key=value config file; explicit flags win");
  std::string phoible_path, proxy_target, proxy_csv, merge_policy = "union";
  std::vector<std::string> proxy_candidates;
  proxy->add_option("--phoible", phoible_path, "PHOIBLE-style CSV")->required();
  proxy->add_option("--target", proxy_target, "target language code or name")->required();
  proxy->add_option("--candidates", proxy_candidates, "candidate codes/names")
      ->required()
      ->delimiter(',');
  proxy->add_option("--merge-policy", merge_policy, "union | first (doculect merging)")
      ->capture_default_str()
      ->check(CLI::IsMember({"union", "first"}));
  proxy->add_option("--csv", proxy_csv, "also write the ranking as CSV to this path");

  // ---- lexicon ----
  auto* lexcmd = app.add_subcommand("lexicon", "normalize a dictionary into canonical records");
  lexcmd->add_option("--config", "flat key=value config file; explicit flags win");
  std::string lex_path, lex_out, lex_format = "auto";
  lexcmd->add_option("--lexicon", lex_path, "dictionary file (CSV or JSONL)")->required();
  lexcmd->add_option("--format", lex_format, "csv | jsonl | auto")->capture_default_str();
  lexcmd->add_option("--out", lex_out, "write the canonical dump here instead of stdout");

  // ---- match ----
  auto* match = app.add_subcommand("match", "lexicon matches for a transcript");
  match->add_option("--config", "flat key=value config file; explicit flags win");
  std::string match_lexicon, match_text, match_format = "auto";
  double match_tau = 0.2;
  int match_k = 3;
  match->add_option("--lexicon", match_lexicon, "dictionary file (CSV or JSONL)")->required();
  match->add_option("--format", match_format, "csv | jsonl | auto")->capture_default_str();
  match->add_option("--text", match_text, "transcript text")->required();
  match->add_option("--tau", match_tau, "CER threshold")->capture_default_str();
  match->add_option("--k", match_k, "top-k entries per word")->capture_default_str();

  // ---- prompt ----
  auto* prompt = app.add_subcommand("prompt", "build translation prompts for a manifest");
  prompt->add_option("--config", "flat key=value config file; explicit flags win");
  std::string prompt_manifest, prompt_lexicon, prompt_out, prompt_format = "auto";
  double prompt_tau = 0.2;
  int prompt_k = 3;
  prompt->add_option("--manifest", prompt_manifest, "corpus manifest (.jsonl)")->required();
  prompt->add_option("--lexicon", prompt_lexicon, "dictionary file (CSV or JSONL)")->required();
  prompt->add_option("--format", prompt_format, "csv | jsonl | auto")->capture_default_str();
  prompt->add_option("--tau", prompt_tau, "CER threshold")->capture_default_str();
  prompt->add_option("--k", prompt_k, "top-k entries per word")->capture_default_str();
  prompt->add_option("--out", prompt_out, "write prompt records here instead of stdout");

  // ---- augment ----
  auto* augment = app.add_subcommand("augment", "build translation training pairs");
  augment->add_option("--config", "flat key=value config file; explicit flags win");
  std::string aug_manifest, aug_utterances, aug_predictions, aug_out;
  corpus::AugmentOptions aug_options;
  augment->add_option("--manifest", aug_manifest, "corpus manifest (.jsonl)")->required();
  augment->add_option("--utterances", aug_utterances, "utterance file from ingest (.jsonl)")
      ->required();
  augment->add_flag("--short,!--no-short", aug_options.include_short,
                    "emit per-utterance pairs (default on)");
  augment->add_flag("--long,!--no-long", aug_options.include_long,
                    "emit per-sample pairs (default on)");
  augment->add_flag("--predicted", aug_options.include_predicted,
                    "also emit pairs with predicted source text");
  augment->add_option("--predictions", aug_predictions, "JSON object of id -> predicted text");
  augment->add_option("--out", aug_out, "write pairs here instead of stdout");

  // ---- eval-asr ----
  auto* eval_asr = app.add_subcommand("eval-asr", "transcribe a test manifest and score WER/CER");
  eval_asr->add_option("--config", "flat key=value config file; explicit flags win");
  std::string asr_manifest;
  std::string language_token = "<su>";
  ServiceFlags asr_flags;
  eval_asr->add_option("--manifest", asr_manifest, "test manifest (.jsonl)")->required();
  eval_asr->add_option("--language-token", language_token, "decoder language tag")
      ->capture_default_str();
  add_service_flags(eval_asr, asr_flags, "transcriber", "WARDEN_ASR_URL");

  // ---- eval-mt ----
  auto* eval_mt = app.add_subcommand("eval-mt", "translate a test manifest and score BLEU-4");
  eval_mt->add_option("--config", "flat key=value config file; explicit flags win");
  std::string mt_manifest, mt_lexicon, mt_predictions, mt_format = "auto";
  double mt_tau = 0.2;
  int mt_k = 3;
  ServiceFlags mt_flags;
  eval_mt->add_option("--manifest", mt_manifest, "test manifest (.jsonl)")->required();
  eval_mt->add_option("--lexicon", mt_lexicon, "dictionary file (CSV or JSONL)")->required();
  eval_mt->add_option("--format", mt_format, "csv | jsonl | auto")->capture_default_str();
  eval_mt->add_option("--tau", mt_tau, "CER threshold")->capture_default_str();
  eval_mt->add_option("--k", mt_k, "top-k entries per word")->capture_default_str();
  eval_mt->add_option("--predictions", mt_predictions,
                      "JSON object of sample id -> ASR transcript; replaces gold transcriptions");
  add_service_flags(eval_mt, mt_flags, "translator", "WARDEN_TRANSLATOR_URL");

  // ---- grid ----
  auto* grid = app.add_subcommand("grid", "sweep the (tau, k) lexicon-injection grid");
  grid->add_option("--config", "flat key=value config file; explicit flags win");
  std::string grid_manifest, grid_lexicon, grid_format = "auto";
  std::vector<double> grid_taus = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<int> grid_ks = {1, 2, 3, 4, 5};
  ServiceFlags grid_flags;
  grid->add_option("--manifest", grid_manifest, "test manifest (.jsonl)")->required();
  grid->add_option("--lexicon", grid_lexicon, "dictionary file (CSV or JSONL)")->required();
  grid->add_option("--format", grid_format, "csv | jsonl | auto")->capture_default_str();
  grid->add_option("--taus", grid_taus, "CER thresholds (rows)")
      ->capture_default_str()
      ->delimiter(',');
  grid->add_option("--ks", grid_ks, "top-k values (columns)")
      ->capture_default_str()
      ->delimiter(',');
  add_service_flags(grid, grid_flags, "translator", "WARDEN_TRANSLATOR_URL");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!args.empty() && app.get_subcommand_no_throw(args.front()) != nullptr) {
      args = apply_config_file(args);
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes reversed args
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the offending flag or the help text
    return code == 0 ? kOk : kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    if (app.got_subcommand(ingest)) {
      const auto files = io::list_files(ingest_corpus, ".eaf");
      if (files.empty()) throw Error("no .eaf files in " + ingest_corpus);
      std::vector<corpus::Utterance> utterances;
      for (const std::string& path : files) {
        const std::string name = fs::path(path).filename().string();
        const auto parsed = eaf::parse_eaf(io::read_file(path), name, transcription_tier,
                                           translation_tier);
        utterances.insert(utterances.end(), parsed.begin(), parsed.end());
      }
      const auto samples = corpus::concatenate_segments(utterances, max_duration_ms);
      io::write_file(ingest_out + "/utterances.jsonl", corpus::write_utterances(utterances));
      io::write_file(ingest_out + "/manifest.jsonl", corpus::write_manifest(samples));
      const std::string table = corpus::render_stats(corpus::corpus_stats(samples));
      io::write_file(ingest_out + "/stats.txt", table);
      std::cout << table;
      std::cout << "wrote " << ingest_out << "/manifest.jsonl\n";
      return kOk;
    }

    if (app.got_subcommand(stats)) {
      const auto samples = load_manifest(stats_manifest);
      std::cout << corpus::render_stats(corpus::corpus_stats(samples));
      if (!stats_lexicon.empty()) {
        const auto lex = load_lexicon(stats_lexicon, stats_lexicon_format);
        std::set<std::string> vocabulary;
        for (const corpus::Sample& s : samples) {
          for (const std::string& token : text::split_tokens(s.transcription)) {
            const std::string stripped = text::strip_edge_punctuation(token);
            if (!stripped.empty()) vocabulary.insert(stripped);
          }
        }
        std::size_t covered = 0;
        for (const std::string& form : vocabulary) {
          if (!lex.lookup_exact(form).empty()) ++covered;
        }
        const double ratio =
            vocabulary.empty() ? 0.0 : static_cast<double>(covered) / vocabulary.size();
        std::cout << "lexicon coverage: " << text::format_fixed(100.0 * ratio, 1) << "% of "
                  << vocabulary.size() << " distinct transcript tokens\n";
      }
      return kOk;
    }

    if (app.got_subcommand(split)) {
      const auto samples = load_manifest(split_manifest);
      const corpus::Split parts = corpus::split_by_file(samples, test_fraction, seed);
      io::write_file(split_out + "/train.jsonl", corpus::write_manifest(parts.train));
      io::write_file(split_out + "/test.jsonl", corpus::write_manifest(parts.test));
      std::cout << "train: " << parts.train.size() << " samples  test: " << parts.test.size()
                << " samples\n";
      return kOk;
    }

    if (app.got_subcommand(proxy)) {
      const auto inventories = phonology::load_phoible(
          io::read_file(phoible_path), merge_policy == "first"
                                           ? phonology::MergePolicy::first_inventory
                                           : phonology::MergePolicy::union_by_code);
      const auto ranking = phonology::rank_proxies(proxy_target, proxy_candidates, inventories);
      std::cout << phonology::render_ranking(ranking);
      if (!proxy_csv.empty()) io::write_file(proxy_csv, phonology::ranking_to_csv(ranking));
      return kOk;
    }

    if (app.got_subcommand(lexcmd)) {
      const auto lex = load_lexicon(lex_path, lex_format);
      emit(lexicon::dump_lexicon(lex), lex_out);
      std::cerr << "entries: " << lex.size() << "\n";
      return kOk;
    }

    if (app.got_subcommand(match)) {
      const auto lex = load_lexicon(match_lexicon, match_format);
      const auto matches = matcher::match_transcript(match_text, lex, match_k, match_tau);
      std::cout << matcher::report_matches(matches, lex);
      return kOk;
    }

    if (app.got_subcommand(prompt)) {
      const auto samples = load_manifest(prompt_manifest);
      const auto lex = load_lexicon(prompt_lexicon, prompt_format);
      std::vector<prompting::PromptBundle> bundles;
      bundles.reserve(samples.size());
      for (const corpus::Sample& s : samples) {
        const auto matches = matcher::match_transcript(s.transcription, lex, prompt_k, prompt_tau);
        bundles.push_back(prompting::build_prompt(s.transcription, matches, lex));
      }
      emit(prompting::bundles_to_jsonl(bundles), prompt_out);
      return kOk;
    }

    if (app.got_subcommand(augment)) {
      const auto samples = load_manifest(aug_manifest);
      const auto utterances = load_utterances(aug_utterances);
      std::map<std::string, std::string> predictions;
      if (!aug_predictions.empty()) predictions = load_predictions(aug_predictions);
      std::vector<std::string> skipped;
      const auto pairs = corpus::build_training_pairs(
          samples, utterances, aug_predictions.empty() ? nullptr : &predictions, aug_options,
          &skipped);
      emit(corpus::write_pairs(pairs), aug_out);
      std::cerr << "pairs: " << pairs.size() << "  skipped: " << skipped.size() << "\n";
      return kOk;
    }

    if (app.got_subcommand(eval_asr)) {
      const auto samples = load_manifest(asr_manifest);
      const auto transcriber =
          clients::make_transcriber(asr_flags.endpoint, asr_flags.http(), gold_from(samples));
      pipeline::RunOptions options = asr_flags.run(asr_flags.run_dir);
      options.language_token = language_token;
      return finish_eval(pipeline::run_transcription_eval(samples, *transcriber, options));
    }

    if (app.got_subcommand(eval_mt)) {
      const auto samples = load_manifest(mt_manifest);
      const auto lex = load_lexicon(mt_lexicon, mt_format);
      const auto translator =
          clients::make_translator(mt_flags.endpoint, mt_flags.http(), gold_from(samples));
      pipeline::RunOptions options = mt_flags.run(mt_flags.run_dir);
      std::map<std::string, std::string> predictions;
      if (!mt_predictions.empty()) {
        predictions = load_predictions(mt_predictions);
        options.predictions = &predictions;
      }
      return finish_eval(
          pipeline::run_translation_eval(samples, lex, mt_tau, mt_k, *translator, options));
    }

    if (app.got_subcommand(grid)) {
      const auto samples = load_manifest(grid_manifest);
      const auto lex = load_lexicon(grid_lexicon, grid_format);
      const auto translator =
          clients::make_translator(grid_flags.endpoint, grid_flags.http(), gold_from(samples));
      const auto result = pipeline::grid_search(samples, lex, grid_taus, grid_ks, *translator,
                                                grid_flags.run(grid_flags.run_dir));
      std::cout << pipeline::render_grid(result);
      for (const pipeline::GridCell& cell : result.cells) {
        if (cell.failed || cell.report.partial) return kPartial;
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }

  return kOk;
}
