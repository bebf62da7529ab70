#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "warden/corpus.hpp"
#include "warden/errors.hpp"

using namespace warden;
using corpus::Sample;
using corpus::Utterance;

namespace {

Utterance make_utterance(std::string file, std::string id, std::int64_t start, std::int64_t end,
                         std::string transcription, std::string translation = "") {
  Utterance u;
  u.id = std::move(id);
  u.source_file = std::move(file);
  u.start_ms = start;
  u.end_ms = end;
  u.transcription = std::move(transcription);
  u.translation = std::move(translation);
  return u;
}

// invariants any packing must satisfy, regardless of input
void check_packing(const std::vector<Utterance>& utterances, const std::vector<Sample>& samples,
                   std::int64_t max_duration_ms) {
  std::map<std::string, const Utterance*> by_id;
  for (const Utterance& u : utterances) by_id[u.id] = &u;

  std::set<std::string> seen;
  for (const Sample& s : samples) {
    REQUIRE(!s.utterance_ids.empty());
    std::int64_t lo = by_id.at(s.utterance_ids.front())->start_ms;
    std::int64_t hi = by_id.at(s.utterance_ids.front())->end_ms;
    for (const std::string& id : s.utterance_ids) {
      CHECK(seen.insert(id).second);  // partition: no utterance reused
      const Utterance* u = by_id.at(id);
      CHECK(u->source_file == s.source_file);  // never mixes files
      lo = std::min(lo, u->start_ms);
      hi = std::max(hi, u->end_ms);
    }
    CHECK(s.span_start_ms == lo);
    CHECK(s.span_end_ms == hi);
    if (s.oversize) {
      CHECK(s.utterance_ids.size() == 1);
      CHECK(s.span_end_ms - s.span_start_ms > max_duration_ms);
    } else {
      CHECK(s.span_end_ms - s.span_start_ms <= max_duration_ms);
    }
  }
  CHECK(seen.size() == utterances.size());  // nothing dropped
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("greedy packing closes a sample at the duration budget") {
    const std::vector<Utterance> utts = {
        make_utterance("f.eaf", "f.eaf#u1", 0, 10000, "one"),
        make_utterance("f.eaf", "f.eaf#u2", 10000, 20000, "two"),
        make_utterance("f.eaf", "f.eaf#u3", 20000, 35000, "three"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 2);

    CHECK(samples[0].id == "f.eaf#s0000");
    CHECK(samples[0].utterance_ids == std::vector<std::string>{"f.eaf#u1", "f.eaf#u2"});
    CHECK(samples[0].span_start_ms == 0);
    CHECK(samples[0].span_end_ms == 20000);
    CHECK(samples[0].transcription == "one two");
    CHECK_FALSE(samples[0].oversize);

    // the trailing 15s utterance fits the budget on its own: not oversize
    CHECK(samples[1].id == "f.eaf#s0001");
    CHECK(samples[1].utterance_ids == std::vector<std::string>{"f.eaf#u3"});
    CHECK(samples[1].span_end_ms - samples[1].span_start_ms == 15000);
    CHECK_FALSE(samples[1].oversize);
  }

  TEST_CASE("a lone utterance over the budget is flagged oversize") {
    const std::vector<Utterance> utts = {
        make_utterance("f.eaf", "f.eaf#u1", 0, 35000, "long"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].oversize);
    CHECK(samples[0].transcription == "long");
  }

  TEST_CASE("an oversize utterance in mid-file stands alone") {
    const std::vector<Utterance> utts = {
        make_utterance("f.eaf", "f.eaf#u1", 0, 5000, "a"),
        make_utterance("f.eaf", "f.eaf#u2", 5000, 40000, "b"),
        make_utterance("f.eaf", "f.eaf#u3", 40000, 45000, "c"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 3);
    CHECK_FALSE(samples[0].oversize);
    CHECK(samples[1].oversize);
    CHECK(samples[1].utterance_ids == std::vector<std::string>{"f.eaf#u2"});
    CHECK_FALSE(samples[2].oversize);
  }

  TEST_CASE("span budget counts silence between utterances") {
    // two 5s utterances 25s apart: total span 31s, so they cannot share
    const std::vector<Utterance> utts = {
        make_utterance("f.eaf", "f.eaf#u1", 0, 5000, "a"),
        make_utterance("f.eaf", "f.eaf#u2", 26000, 31000, "b"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 2);
  }

  TEST_CASE("samples never cross file boundaries") {
    const std::vector<Utterance> utts = {
        make_utterance("a.eaf", "a.eaf#u1", 0, 1000, "x"),
        make_utterance("b.eaf", "b.eaf#u1", 1000, 2000, "y"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].source_file == "a.eaf");
    CHECK(samples[1].source_file == "b.eaf");
  }

  TEST_CASE("missing translations leave gaps, joined text skips them") {
    const std::vector<Utterance> utts = {
        make_utterance("f.eaf", "f.eaf#u1", 0, 1000, "one", "eins"),
        make_utterance("f.eaf", "f.eaf#u2", 1000, 2000, "two", ""),
        make_utterance("f.eaf", "f.eaf#u3", 2000, 3000, "three", "drei"),
    };
    const auto samples = corpus::concatenate_segments(utts, 30000);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].transcription == "one two three");
    CHECK(samples[0].translation == "eins drei");
  }

  TEST_CASE("empty input and bad budget") {
    CHECK(corpus::concatenate_segments({}, 30000).empty());
    CHECK_THROWS_AS(corpus::concatenate_segments({}, 0), std::invalid_argument);
    CHECK_THROWS_AS(corpus::concatenate_segments({}, -5), std::invalid_argument);
  }

  TEST_CASE("packing invariants hold on randomized corpora") {
    std::mt19937_64 rng(20240917);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Utterance> utts;
      const std::size_t n_files = 1 + rng() % 4;
      for (std::size_t f = 0; f < n_files; ++f) {
        const std::string file = "f" + std::to_string(f) + ".eaf";
        std::int64_t cursor = static_cast<std::int64_t>(rng() % 5000);
        const std::size_t n_utts = rng() % 20;
        for (std::size_t i = 0; i < n_utts; ++i) {
          cursor += static_cast<std::int64_t>(rng() % 8000);
          const auto len = static_cast<std::int64_t>(500 + rng() % 40000);
          utts.push_back(make_utterance(file, file + "#u" + std::to_string(i), cursor,
                                        cursor + len, "w" + std::to_string(i)));
          cursor += len;
        }
      }
      const auto samples = corpus::concatenate_segments(utts, 30000);
      check_packing(utts, samples, 30000);
    }
  }

  TEST_CASE("split is deterministic and keeps files whole") {
    std::vector<Sample> samples;
    for (int f = 0; f < 10; ++f) {
      for (int s = 0; s < 3; ++s) {
        Sample sample;
        sample.id = "f" + std::to_string(f) + ".eaf#s000" + std::to_string(s);
        sample.source_file = "f" + std::to_string(f) + ".eaf";
        samples.push_back(sample);
      }
    }

    const auto split1 = corpus::split_by_file(samples, 0.2, 42);
    const auto split2 = corpus::split_by_file(samples, 0.2, 42);
    CHECK(split1.train.size() + split1.test.size() == samples.size());
    CHECK(split1.test.size() == 6);  // 2 of 10 files, 3 samples each

    auto ids = [](const std::vector<Sample>& v) {
      std::vector<std::string> out;
      for (const auto& s : v) out.push_back(s.id);
      return out;
    };
    CHECK(ids(split1.train) == ids(split2.train));
    CHECK(ids(split1.test) == ids(split2.test));

    std::set<std::string> train_files, test_files;
    for (const auto& s : split1.train) train_files.insert(s.source_file);
    for (const auto& s : split1.test) test_files.insert(s.source_file);
    for (const auto& f : test_files) CHECK(train_files.count(f) == 0);
  }

  TEST_CASE("split follows the documented shuffle") {
    // replay the header's algorithm: Fisher-Yates over the sorted file
    // list driven by mt19937_64(seed) and rng() % (i + 1)
    std::vector<Sample> samples;
    std::vector<std::string> files;
    for (int f = 0; f < 7; ++f) {
      Sample s;
      s.source_file = "file" + std::to_string(f) + ".eaf";
      s.id = s.source_file + "#s0000";
      samples.push_back(s);
      files.push_back(s.source_file);
    }

    std::mt19937_64 rng(123);
    for (std::size_t i = files.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(files[i], files[j]);
    }
    const std::set<std::string> expected_test(files.begin(), files.begin() + 1);  // round(0.1*7)=1

    const auto split = corpus::split_by_file(samples, 0.1, 123);
    std::set<std::string> got_test;
    for (const auto& s : split.test) got_test.insert(s.source_file);
    CHECK(got_test == expected_test);
  }

  TEST_CASE("split clamps to leave both sides non-empty") {
    std::vector<Sample> samples;
    for (int f = 0; f < 2; ++f) {
      Sample s;
      s.source_file = "f" + std::to_string(f) + ".eaf";
      s.id = s.source_file + "#s0000";
      samples.push_back(s);
    }
    const auto tiny = corpus::split_by_file(samples, 0.01, 7);
    CHECK(tiny.test.size() == 1);
    CHECK(tiny.train.size() == 1);
    const auto huge = corpus::split_by_file(samples, 0.99, 7);
    CHECK(huge.test.size() == 1);
    CHECK(huge.train.size() == 1);
  }

  TEST_CASE("split rejects degenerate inputs") {
    std::vector<Sample> one_file(3);
    for (auto& s : one_file) s.source_file = "only.eaf";
    CHECK_THROWS_AS(corpus::split_by_file(one_file, 0.2, 1), InsufficientFiles);
    CHECK_THROWS_AS(corpus::split_by_file({}, 0.2, 1), InsufficientFiles);

    std::vector<Sample> two(2);
    two[0].source_file = "a.eaf";
    two[1].source_file = "b.eaf";
    CHECK_THROWS_AS(corpus::split_by_file(two, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(corpus::split_by_file(two, 1.0, 1), std::invalid_argument);
  }

  TEST_CASE("corpus stats over known samples") {
    Sample s1;
    s1.source_file = "a.eaf";
    s1.span_start_ms = 0;
    s1.span_end_ms = 20000;
    s1.transcription = "yibiyan wurrugu nganing-gin mama";
    s1.translation = "the old man";
    Sample s2;
    s2.source_file = "b.eaf";
    s2.span_start_ms = 20000;
    s2.span_end_ms = 35000;
    s2.transcription = "yawu ga-ngu";
    s2.translation = "he is going";

    const auto stats = corpus::corpus_stats({s1, s2});
    CHECK_FALSE(stats.empty);
    CHECK(stats.sample_count == 2);
    CHECK(stats.file_count == 2);
    CHECK(stats.audio_seconds.total == doctest::Approx(35.0));
    CHECK(stats.audio_seconds.average == doctest::Approx(17.5));
    CHECK(stats.audio_seconds.min == doctest::Approx(15.0));
    CHECK(stats.audio_seconds.max == doctest::Approx(20.0));
    CHECK(stats.transcription_words.total == doctest::Approx(6.0));
    CHECK(stats.transcription_words.average == doctest::Approx(3.0));
    CHECK(stats.translation_words.total == doctest::Approx(6.0));
    CHECK(stats.translation_words.min == doctest::Approx(3.0));

    const std::string table = corpus::render_stats(stats);
    CHECK(table.find("audio") != std::string::npos);
    CHECK(table.find("35.0") != std::string::npos);
    CHECK(table.find("17.50") != std::string::npos);
    CHECK(table.find("samples: 2  files: 2") != std::string::npos);
  }

  TEST_CASE("stats on an empty corpus") {
    const auto stats = corpus::corpus_stats({});
    CHECK(stats.empty);
    CHECK(stats.sample_count == 0);
    const std::string table = corpus::render_stats(stats);
    CHECK(table.find("(empty corpus)") != std::string::npos);
  }

  TEST_CASE("training pairs: gold, predicted, dedup, skips") {
    Sample s1;
    s1.id = "f#s0000";
    s1.transcription = "tok a";
    s1.translation = "A";
    Sample s2;
    s2.id = "f#s0001";
    s2.transcription = "tok b";
    s2.translation = "";  // untranslated: cannot form a pair

    const std::vector<Utterance> utts = {
        make_utterance("f", "f#u1", 0, 1, "tok a", "A"),  // same text as s1, different provenance
        make_utterance("f", "f#u2", 1, 2, "tok c", "C"),
        make_utterance("f", "f#u3", 2, 3, "", "X"),       // no source side
        make_utterance("f", "f#u4", 3, 4, "tok c", "C"),  // duplicate of u2
    };

    corpus::AugmentOptions gold_only;
    auto pairs = corpus::build_training_pairs({s1, s2}, utts, nullptr, gold_only);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].source == "tok a");
    CHECK(pairs[0].provenance == corpus::Provenance::gold_long);
    CHECK(pairs[1].provenance == corpus::Provenance::gold_short);
    CHECK(pairs[2].source == "tok c");

    const std::map<std::string, std::string> predictions = {
        {"f#s0000", "pred a"},
        {"f#u2", "pred c"},
    };
    corpus::AugmentOptions all;
    all.include_predicted = true;
    std::vector<std::string> skipped;
    pairs = corpus::build_training_pairs({s1, s2}, utts, &predictions, all, &skipped);
    REQUIRE(pairs.size() == 5);
    CHECK(pairs[3].source == "pred a");
    CHECK(pairs[3].provenance == corpus::Provenance::predicted_long);
    CHECK(pairs[4].source == "pred c");
    CHECK(pairs[4].provenance == corpus::Provenance::predicted_short);
    // every id that wanted a prediction and had none
    CHECK(skipped == std::vector<std::string>{"f#s0001", "f#u1", "f#u3", "f#u4"});
  }

  TEST_CASE("training pair option errors") {
    corpus::AugmentOptions none;
    none.include_short = false;
    none.include_long = false;
    CHECK_THROWS_AS(corpus::build_training_pairs({}, {}, nullptr, none), std::invalid_argument);

    corpus::AugmentOptions predicted;
    predicted.include_predicted = true;
    CHECK_THROWS_AS(corpus::build_training_pairs({}, {}, nullptr, predicted), MissingPredictions);
    const std::map<std::string, std::string> empty;
    CHECK_THROWS_AS(corpus::build_training_pairs({}, {}, &empty, predicted), MissingPredictions);
  }

  TEST_CASE("sample json round trip") {
    Sample s;
    s.id = "f.eaf#s0002";
    s.source_file = "f.eaf";
    s.utterance_ids = {"f.eaf#u5", "f.eaf#u6"};
    s.span_start_ms = 1500;
    s.span_end_ms = 29000;
    s.transcription = "yawu \"quoted\" text";
    s.translation = "with, comma";
    s.oversize = false;

    const std::string line = corpus::sample_to_json(s);
    const Sample back = corpus::sample_from_json(line);
    CHECK(back.id == s.id);
    CHECK(back.source_file == s.source_file);
    CHECK(back.span_start_ms == s.span_start_ms);
    CHECK(back.span_end_ms == s.span_end_ms);
    CHECK(back.transcription == s.transcription);
    CHECK(back.translation == s.translation);
    CHECK(back.oversize == s.oversize);
    // canonical form is a fixed point
    CHECK(corpus::sample_to_json(back) == line);
  }

  TEST_CASE("manifest and utterance files round trip") {
    const std::vector<Utterance> utts = {
        make_utterance("a.eaf", "a.eaf#u1", 0, 900, "hello", "hi"),
        make_utterance("a.eaf", "a.eaf#u2", 900, 1800, "näin", ""),
    };
    const std::string body = corpus::write_utterances(utts);
    const auto back = corpus::read_utterances(body);
    REQUIRE(back.size() == 2);
    CHECK(back[0].translation == "hi");
    CHECK(back[1].transcription == "näin");
    CHECK(corpus::write_utterances(back) == body);

    const auto samples = corpus::concatenate_segments(utts, 30000);
    const std::string manifest = corpus::write_manifest(samples);
    const auto samples_back = corpus::read_manifest(manifest);
    REQUIRE(samples_back.size() == samples.size());
    CHECK(samples_back[0].transcription == samples[0].transcription);
    CHECK(corpus::write_manifest(samples_back) == manifest);
  }

  TEST_CASE("malformed records are rejected") {
    CHECK_THROWS_AS(corpus::sample_from_json("not json"), MalformedRecord);
    CHECK_THROWS_AS(corpus::sample_from_json("[1,2]"), MalformedRecord);
    CHECK_THROWS_AS(corpus::sample_from_json(R"({"id": "x"})"), MalformedRecord);
    CHECK_THROWS_AS(corpus::utterance_from_json(R"({"id": 3})"), MalformedRecord);
    CHECK_THROWS_AS(corpus::read_manifest("{}\n"), MalformedRecord);
  }

  TEST_CASE("provenance names") {
    using corpus::Provenance;
    for (Provenance p : {Provenance::gold_short, Provenance::gold_long, Provenance::predicted_short,
                         Provenance::predicted_long}) {
      CHECK(corpus::provenance_from_name(corpus::provenance_name(p)) == p);
    }
    CHECK_THROWS_AS(corpus::provenance_from_name("silver"), MalformedRecord);
  }
}
