#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "warden/clients.hpp"
#include "warden/errors.hpp"
#include "warden/io.hpp"
#include "warden/lexicon.hpp"
#include "warden/matcher.hpp"
#include "warden/prompting.hpp"

using namespace warden;
using clients::HttpOptions;
using clients::MockGold;
using prompting::PromptBundle;

namespace {

PromptBundle bare_prompt(const std::string& transcript) {
  PromptBundle bundle;
  bundle.system = prompting::kSystemPrompt;
  bundle.user = "Transcription: " + transcript + ". Lexicon entries: none";
  return bundle;
}

PromptBundle fixture_prompt(const std::string& transcript) {
  const auto lex = lexicon::parse_lexicon(
      io::read_file(std::string(WARDEN_TEST_DATA) + "/lexicon.csv"), lexicon::Format::csv);
  return prompting::build_prompt(transcript, matcher::match_transcript(transcript, lex, 3, 0.2),
                                 lex);
}

// in-process HTTP fixture; handler runs on the server thread
class LocalServer {
 public:
  template <typename Handler>
  explicit LocalServer(Handler&& handler) {
    server_.Post("/v1/complete", std::forward<Handler>(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpOptions fast_options() {
  HttpOptions options;
  options.timeout_seconds = 5;
  options.max_retries = 1;
  options.backoff_initial_ms = 1;
  return options;
}

}  // namespace

TEST_SUITE("clients") {
  TEST_CASE("transcript extraction inverts prompt construction") {
    for (const std::string transcript :
         {std::string("yibiyan"), std::string("yawu ga-ngu"), std::string("zzz qqq")}) {
      CHECK(clients::transcript_of_prompt(fixture_prompt(transcript).user) == transcript);
      CHECK(clients::transcript_of_prompt(bare_prompt(transcript).user) == transcript);
    }
    CHECK_THROWS_AS(clients::transcript_of_prompt("no prefix here"), MalformedRecord);
    CHECK_THROWS_AS(clients::transcript_of_prompt("Transcription: x with no entries"),
                    MalformedRecord);
  }

  TEST_CASE("gloss extraction handles commas inside glosses") {
    auto glosses = clients::glosses_of_prompt(fixture_prompt("yibiyan").user);
    CHECK(glosses == std::vector<std::string>{"man, person", "man"});

    glosses = clients::glosses_of_prompt(fixture_prompt("yawu ga-ngu").user);
    CHECK(glosses == std::vector<std::string>{"3sg subject", "is going"});

    CHECK(clients::glosses_of_prompt(bare_prompt("x").user).empty());
  }

  TEST_CASE("echo translator returns gold keyed by transcript") {
    MockGold gold;
    gold.translation_by_transcript["yawu ga-ngu"] = "he is going";
    const auto translator = clients::make_translator("mock:echo", {}, gold);
    CHECK(translator->translate(bare_prompt("yawu ga-ngu")) == "he is going");
    CHECK_THROWS_AS(translator->translate(bare_prompt("unseen")), ClientUnavailable);
  }

  TEST_CASE("gloss translator concatenates prompt glosses") {
    const auto translator = clients::make_translator("mock:gloss");
    CHECK(translator->translate(fixture_prompt("yibiyan")) == "man, person man");
    CHECK(translator->translate(fixture_prompt("yawu ga-ngu")) == "3sg subject is going");
    CHECK(translator->translate(bare_prompt("zzz")) == "");
  }

  TEST_CASE("noise translator corrupts every nth token") {
    MockGold gold;
    gold.translation_by_transcript["t"] = "the old man is going";
    auto translator = clients::make_translator("mock:noise:0.5", {}, gold);
    CHECK(translator->translate(bare_prompt("t")) == "the zzznoise man zzznoise going");

    translator = clients::make_translator("mock:noise:0.2", {}, gold);
    CHECK(translator->translate(bare_prompt("t")) == "the old man is zzznoise");

    translator = clients::make_translator("mock:noise:1", {}, gold);
    CHECK(translator->translate(bare_prompt("t")) ==
          "zzznoise zzznoise zzznoise zzznoise zzznoise");

    CHECK_THROWS_AS(translator->translate(bare_prompt("unseen")), ClientUnavailable);
  }

  TEST_CASE("noise transcriber corrupts gold transcriptions") {
    MockGold gold;
    gold.transcription_by_audio["f.eaf#s0000"] = "yibiyan wurrugu yawu ga-ngu";
    const auto transcriber = clients::make_transcriber("mock:noise:0.25", {}, gold);
    CHECK(transcriber->transcribe("f.eaf#s0000", "<su>") == "yibiyan wurrugu yawu zzznoise");
    CHECK_THROWS_AS(transcriber->transcribe("missing", "<su>"), ClientUnavailable);
  }

  TEST_CASE("echo transcriber returns gold keyed by audio ref") {
    MockGold gold;
    gold.transcription_by_audio["a.eaf#s0001"] = "warda lagla";
    const auto transcriber = clients::make_transcriber("mock:echo", {}, gold);
    CHECK(transcriber->transcribe("a.eaf#s0001", "<su>") == "warda lagla");
  }

  TEST_CASE("endpoint validation") {
    CHECK_THROWS_AS(clients::make_translator("carrier-pigeon"), std::invalid_argument);
    CHECK_THROWS_AS(clients::make_transcriber("carrier-pigeon"), std::invalid_argument);
    CHECK_THROWS_AS(clients::make_transcriber("mock:gloss"), std::invalid_argument);
    CHECK_THROWS_AS(clients::make_translator("mock:noise:0"), std::invalid_argument);
    CHECK_THROWS_AS(clients::make_translator("mock:noise:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(clients::make_translator("mock:noise:abc"), std::invalid_argument);
    CHECK_NOTHROW(clients::make_translator("mock:noise:0.1"));
  }

  TEST_CASE("http translator posts the bundle and reads text back") {
    std::atomic<int> hits{0};
    std::string seen_body;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
      hits++;
      seen_body = req.body;
      res.set_content(R"({"text": "served translation"})", "application/json");
    });

    HttpOptions options = fast_options();
    options.model = "test-model";
    const auto translator = clients::make_translator(server.url(), options);
    CHECK(translator->translate(bare_prompt("yawu")) == "served translation");
    CHECK(hits == 1);

    const auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["system"] == std::string(prompting::kSystemPrompt));
    CHECK(body["user"] == "Transcription: yawu. Lexicon entries: none");
  }

  TEST_CASE("http transcriber posts audio ref and language token") {
    std::string seen_body;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
      seen_body = req.body;
      res.set_content(R"({"text": "yibiyan wurrugu"})", "application/json");
    });

    const auto transcriber = clients::make_transcriber(server.url(), fast_options());
    CHECK(transcriber->transcribe("corpus/a.eaf#s0000", "<su>") == "yibiyan wurrugu");

    const auto body = nlohmann::json::parse(seen_body);
    CHECK(body["audio_url"] == "corpus/a.eaf#s0000");
    CHECK(body["language"] == "<su>");
  }

  TEST_CASE("client errors fail fast, server errors retry") {
    std::atomic<int> hits{0};
    LocalServer flaky([&](const httplib::Request&, httplib::Response& res) {
      if (++hits < 3) {
        res.status = 503;
      } else {
        res.set_content(R"({"text": "finally"})", "application/json");
      }
    });
    HttpOptions options = fast_options();
    options.max_retries = 3;
    CHECK(clients::make_translator(flaky.url(), options)->translate(bare_prompt("x")) == "finally");
    CHECK(hits == 3);

    hits = 0;
    LocalServer not_found([&](const httplib::Request&, httplib::Response& res) {
      hits++;
      res.status = 404;
    });
    CHECK_THROWS_AS(clients::make_translator(not_found.url(), options)->translate(bare_prompt("x")),
                    ClientUnavailable);
    CHECK(hits == 1);  // no retry on 4xx

    hits = 0;
    LocalServer always_down([&](const httplib::Request&, httplib::Response& res) {
      hits++;
      res.status = 500;
    });
    options.max_retries = 2;
    CHECK_THROWS_AS(
        clients::make_translator(always_down.url(), options)->translate(bare_prompt("x")),
        ClientUnavailable);
    CHECK(hits == 3);  // first attempt + 2 retries
  }

  TEST_CASE("malformed service responses are not retried") {
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
      hits++;
      res.set_content(R"({"words": "wrong shape"})", "application/json");
    });
    CHECK_THROWS_AS(
        clients::make_translator(server.url(), fast_options())->translate(bare_prompt("x")),
        MalformedRecord);
    CHECK(hits == 1);
  }

  TEST_CASE("unreachable hosts surface as ClientUnavailable") {
    // grab a free port, then close it again so nothing listens there
    int dead_port = 0;
    {
      httplib::Server probe;
      dead_port = probe.bind_to_any_port("127.0.0.1");
    }
    const std::string url = "http://127.0.0.1:" + std::to_string(dead_port) + "/v1/complete";
    HttpOptions options = fast_options();
    options.max_retries = 0;
    CHECK_THROWS_AS(clients::make_translator(url, options)->translate(bare_prompt("x")),
                    ClientUnavailable);
    CHECK_THROWS_AS(clients::make_transcriber(url, options)->transcribe("a", "<su>"),
                    ClientUnavailable);
  }
}
