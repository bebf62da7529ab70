#include "warden/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "warden/text.hpp"

namespace warden::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string make_sample_id(const std::string& file, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#s%04zu", index);
  return file + buf;
}

void append_joined(std::string& target, const std::string& piece) {
  if (piece.empty()) return;
  if (!target.empty()) target.push_back(' ');
  target += piece;
}

CategoryStats finalize(const std::vector<double>& values) {
  CategoryStats stats;
  if (values.empty()) return stats;
  stats.min = values.front();
  stats.max = values.front();
  for (double v : values) {
    stats.total += v;
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
  }
  stats.average = stats.total / static_cast<double>(values.size());
  return stats;
}

ordered_json parse_line(std::string_view line) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedRecord("bad JSON record: " + std::string(line.substr(0, 80)));
  }
  return j;
}

template <typename Fn>
void for_each_line(std::string_view body, Fn&& fn) {
  std::size_t start = 0;
  while (start < body.size()) {
    std::size_t end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line);
    start = end + 1;
  }
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::gold_short:
      return "gold_short";
    case Provenance::gold_long:
      return "gold_long";
    case Provenance::predicted_short:
      return "predicted_short";
    case Provenance::predicted_long:
      return "predicted_long";
  }
  return "gold_long";
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "gold_short") return Provenance::gold_short;
  if (name == "gold_long") return Provenance::gold_long;
  if (name == "predicted_short") return Provenance::predicted_short;
  if (name == "predicted_long") return Provenance::predicted_long;
  throw MalformedRecord("unknown provenance '" + std::string(name) + "'");
}

std::vector<Sample> concatenate_segments(const std::vector<Utterance>& utterances,
                                         std::int64_t max_duration_ms) {
  if (max_duration_ms <= 0) {
    throw std::invalid_argument("concatenate_segments: max_duration_ms must be positive");
  }

  // canonical (file, time) order regardless of input order
  std::map<std::string, std::vector<const Utterance*>> by_file;
  for (const Utterance& u : utterances) {
    by_file[u.source_file].push_back(&u);
  }

  std::vector<Sample> samples;
  for (auto& [file, list] : by_file) {
    std::sort(list.begin(), list.end(), [](const Utterance* a, const Utterance* b) {
      return std::tie(a->start_ms, a->end_ms, a->id) < std::tie(b->start_ms, b->end_ms, b->id);
    });

    Sample current;
    std::size_t index = 0;
    auto flush = [&] {
      if (current.utterance_ids.empty()) return;
      current.id = make_sample_id(file, index++);
      current.oversize = current.utterance_ids.size() == 1 &&
                         current.span_end_ms - current.span_start_ms > max_duration_ms;
      samples.push_back(std::move(current));
      current = Sample{};
    };

    for (const Utterance* u : list) {
      if (!current.utterance_ids.empty() && u->end_ms - current.span_start_ms > max_duration_ms) {
        flush();
      }
      if (current.utterance_ids.empty()) {
        current.source_file = file;
        current.span_start_ms = u->start_ms;
      }
      current.utterance_ids.push_back(u->id);
      current.span_end_ms = u->end_ms;
      append_joined(current.transcription, u->transcription);
      append_joined(current.translation, u->translation);
    }
    flush();
  }
  return samples;
}

Split split_by_file(const std::vector<Sample>& samples, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split_by_file: test_fraction must be in (0, 1)");
  }

  std::set<std::string> file_set;
  for (const Sample& s : samples) file_set.insert(s.source_file);
  if (file_set.size() < 2) {
    throw InsufficientFiles("split_by_file: need at least 2 distinct files, have " +
                            std::to_string(file_set.size()));
  }

  std::vector<std::string> files(file_set.begin(), file_set.end());
  // explicit Fisher-Yates so the partition is stable across standard
  // library implementations
  std::mt19937_64 rng(seed);
  for (std::size_t i = files.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(files[i], files[j]);
  }

  const auto n = static_cast<std::int64_t>(files.size());
  std::int64_t n_test = std::llround(test_fraction * static_cast<double>(n));
  n_test = std::clamp<std::int64_t>(n_test, 1, n - 1);

  std::set<std::string> test_files(files.begin(), files.begin() + n_test);
  Split split;
  for (const Sample& s : samples) {
    (test_files.count(s.source_file) ? split.test : split.train).push_back(s);
  }
  return split;
}

CorpusStats corpus_stats(const std::vector<Sample>& samples) {
  CorpusStats stats;
  stats.sample_count = samples.size();
  if (samples.empty()) return stats;
  stats.empty = false;

  std::vector<double> audio, src_words, dst_words;
  std::set<std::string> files;
  audio.reserve(samples.size());
  src_words.reserve(samples.size());
  dst_words.reserve(samples.size());
  for (const Sample& s : samples) {
    audio.push_back(static_cast<double>(s.span_end_ms - s.span_start_ms) / 1000.0);
    src_words.push_back(static_cast<double>(text::count_tokens(s.transcription)));
    dst_words.push_back(static_cast<double>(text::count_tokens(s.translation)));
    files.insert(s.source_file);
  }
  stats.audio_seconds = finalize(audio);
  stats.transcription_words = finalize(src_words);
  stats.translation_words = finalize(dst_words);
  stats.file_count = files.size();
  return stats;
}

std::string render_stats(const CorpusStats& stats) {
  auto int_str = [](double v) { return std::to_string(static_cast<long long>(std::llround(v))); };
  auto pad = [](std::string s, std::size_t width) {
    while (s.size() < width) s.push_back(' ');
    return s;
  };

  std::ostringstream os;
  os << pad("category", 15) << pad("metric", 14) << pad("total", 10) << pad("avg", 8) << "range\n";
  os << pad("audio", 15) << pad("duration (s)", 14)
     << pad(text::format_fixed(stats.audio_seconds.total, 1), 10)
     << pad(text::format_fixed(stats.audio_seconds.average, 2), 8)
     << text::format_fixed(stats.audio_seconds.min, 1) << "-"
     << text::format_fixed(stats.audio_seconds.max, 1) << "\n";
  os << pad("transcription", 15) << pad("#words", 14)
     << pad(int_str(stats.transcription_words.total), 10)
     << pad(text::format_fixed(stats.transcription_words.average, 2), 8)
     << int_str(stats.transcription_words.min) << "-" << int_str(stats.transcription_words.max)
     << "\n";
  os << pad("translation", 15) << pad("#words", 14) << pad(int_str(stats.translation_words.total), 10)
     << pad(text::format_fixed(stats.translation_words.average, 2), 8)
     << int_str(stats.translation_words.min) << "-" << int_str(stats.translation_words.max) << "\n";
  os << "samples: " << stats.sample_count << "  files: " << stats.file_count;
  if (stats.empty) os << "  (empty corpus)";
  os << "\n";
  return os.str();
}

std::vector<TrainingPair> build_training_pairs(const std::vector<Sample>& samples,
                                               const std::vector<Utterance>& utterances,
                                               const std::map<std::string, std::string>* predictions,
                                               const AugmentOptions& options,
                                               std::vector<std::string>* skipped_ids) {
  if (!options.include_short && !options.include_long) {
    throw std::invalid_argument("build_training_pairs: at least one of short/long must be enabled");
  }
  if (options.include_predicted && (predictions == nullptr || predictions->empty())) {
    throw MissingPredictions("build_training_pairs: predicted pairs requested with no predictions");
  }

  std::vector<TrainingPair> pairs;
  std::set<std::tuple<std::string, std::string, Provenance>> seen;
  auto emit = [&](std::string source, std::string target, Provenance prov) {
    if (source.empty() || target.empty()) return;
    auto key = std::make_tuple(source, target, prov);
    if (!seen.insert(std::move(key)).second) return;
    pairs.push_back(TrainingPair{std::move(source), std::move(target), prov});
  };
  auto predicted_for = [&](const std::string& id) -> const std::string* {
    const auto it = predictions->find(id);
    if (it == predictions->end() || it->second.empty()) {
      if (skipped_ids != nullptr) skipped_ids->push_back(id);
      return nullptr;
    }
    return &it->second;
  };

  if (options.include_long) {
    for (const Sample& s : samples) {
      emit(s.transcription, s.translation, Provenance::gold_long);
    }
  }
  if (options.include_short) {
    for (const Utterance& u : utterances) {
      emit(u.transcription, u.translation, Provenance::gold_short);
    }
  }
  if (options.include_predicted) {
    if (options.include_long) {
      for (const Sample& s : samples) {
        if (const std::string* p = predicted_for(s.id)) {
          emit(*p, s.translation, Provenance::predicted_long);
        }
      }
    }
    if (options.include_short) {
      for (const Utterance& u : utterances) {
        if (const std::string* p = predicted_for(u.id)) {
          emit(*p, u.translation, Provenance::predicted_short);
        }
      }
    }
  }
  return pairs;
}

std::string sample_to_json(const Sample& sample) {
  ordered_json j;
  j["id"] = sample.id;
  j["source_file"] = sample.source_file;
  j["span_start_ms"] = sample.span_start_ms;
  j["span_end_ms"] = sample.span_end_ms;
  j["transcription"] = sample.transcription;
  j["translation"] = sample.translation;
  j["oversize_flag"] = sample.oversize;
  return j.dump();
}

Sample sample_from_json(std::string_view line) {
  const ordered_json j = parse_line(line);
  Sample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.source_file = j.at("source_file").get<std::string>();
    s.span_start_ms = j.at("span_start_ms").get<std::int64_t>();
    s.span_end_ms = j.at("span_end_ms").get<std::int64_t>();
    s.transcription = j.at("transcription").get<std::string>();
    s.translation = j.at("translation").get<std::string>();
    s.oversize = j.value("oversize_flag", false);
  } catch (const ordered_json::exception& e) {
    throw MalformedRecord(std::string("bad sample record: ") + e.what());
  }
  return s;
}

std::string write_manifest(const std::vector<Sample>& samples) {
  std::string out;
  for (const Sample& s : samples) {
    out += sample_to_json(s);
    out.push_back('\n');
  }
  return out;
}

std::vector<Sample> read_manifest(std::string_view body) {
  std::vector<Sample> samples;
  for_each_line(body, [&](std::string_view line) { samples.push_back(sample_from_json(line)); });
  return samples;
}

std::string utterance_to_json(const Utterance& u) {
  ordered_json j;
  j["id"] = u.id;
  j["source_file"] = u.source_file;
  j["start_ms"] = u.start_ms;
  j["end_ms"] = u.end_ms;
  j["transcription"] = u.transcription;
  j["translation"] = u.translation;
  return j.dump();
}

Utterance utterance_from_json(std::string_view line) {
  const ordered_json j = parse_line(line);
  Utterance u;
  try {
    u.id = j.at("id").get<std::string>();
    u.source_file = j.at("source_file").get<std::string>();
    u.start_ms = j.at("start_ms").get<std::int64_t>();
    u.end_ms = j.at("end_ms").get<std::int64_t>();
    u.transcription = j.at("transcription").get<std::string>();
    u.translation = j.value("translation", std::string());
  } catch (const ordered_json::exception& e) {
    throw MalformedRecord(std::string("bad utterance record: ") + e.what());
  }
  return u;
}

std::string write_utterances(const std::vector<Utterance>& utterances) {
  std::string out;
  for (const Utterance& u : utterances) {
    out += utterance_to_json(u);
    out.push_back('\n');
  }
  return out;
}

std::vector<Utterance> read_utterances(std::string_view body) {
  std::vector<Utterance> utterances;
  for_each_line(body, [&](std::string_view line) { utterances.push_back(utterance_from_json(line)); });
  return utterances;
}

std::string pair_to_json(const TrainingPair& pair) {
  ordered_json j;
  j["source"] = pair.source;
  j["target"] = pair.target;
  j["provenance"] = std::string(provenance_name(pair.provenance));
  return j.dump();
}

std::string write_pairs(const std::vector<TrainingPair>& pairs) {
  std::string out;
  for (const TrainingPair& p : pairs) {
    out += pair_to_json(p);
    out.push_back('\n');
  }
  return out;
}

}  // namespace warden::corpus
