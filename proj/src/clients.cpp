#include "warden/clients.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "warden/text.hpp"

namespace warden::clients {

namespace {

constexpr std::string_view kTranscriptionPrefix = "Transcription: ";
constexpr std::string_view kEntriesMarker = ". Lexicon entries: ";

// ---- HTTP plumbing -------------------------------------------------------

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw std::invalid_argument("endpoint is not a URL: " + url);
  }
  const std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return Endpoint{url, "/"};
  return Endpoint{url.substr(0, slash), url.substr(slash)};
}

// POSTs a JSON body, retrying transport failures and 5xx with exponential
// backoff, and returns the response's "text" field.
std::string post_for_text(const Endpoint& endpoint, const HttpOptions& options,
                          const std::string& body) {
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    // one client per request keeps concurrent callers independent
    httplib::Client client(endpoint.base);
    client.set_connection_timeout(options.timeout_seconds, 0);
    client.set_read_timeout(options.timeout_seconds, 0);
    client.set_write_timeout(options.timeout_seconds, 0);
    if (!options.api_key.empty()) {
      client.set_default_headers({{"Authorization", "Bearer " + options.api_key}});
    }
    auto res = client.Post(endpoint.path, body, "application/json");
    if (res) {
      if (res->status >= 200 && res->status < 300) {
        const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("text") || !parsed["text"].is_string()) {
          throw MalformedRecord("service response is not a {\"text\": ...} object: " +
                                res->body.substr(0, 200));
        }
        return parsed["text"].get<std::string>();
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500) break;  // client-side error; retrying won't help
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt >= options.max_retries) break;
    const auto backoff = std::chrono::milliseconds(
        static_cast<long long>(options.backoff_initial_ms) << attempt);
    std::this_thread::sleep_for(backoff);
  }
  throw ClientUnavailable(endpoint.base + endpoint.path + ": " + last_error);
}

class HttpTranslator final : public TranslatorClient {
 public:
  HttpTranslator(Endpoint endpoint, HttpOptions options)
      : endpoint_(std::move(endpoint)), options_(std::move(options)) {}

  std::string translate(const prompting::PromptBundle& bundle) override {
    nlohmann::ordered_json body;
    if (!options_.model.empty()) body["model"] = options_.model;
    body["system"] = bundle.system;
    body["user"] = bundle.user;
    return post_for_text(endpoint_, options_, body.dump());
  }

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

class HttpTranscriber final : public TranscriberClient {
 public:
  HttpTranscriber(Endpoint endpoint, HttpOptions options)
      : endpoint_(std::move(endpoint)), options_(std::move(options)) {}

  std::string transcribe(const std::string& audio_ref, const std::string& language_token) override {
    nlohmann::ordered_json body;
    if (!options_.model.empty()) body["model"] = options_.model;
    body["audio_url"] = audio_ref;
    body["language"] = language_token;
    return post_for_text(endpoint_, options_, body.dump());
  }

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

// ---- deterministic mocks -------------------------------------------------

std::string corrupt(const std::string& gold, int period) {
  const std::vector<std::string> tokens = text::split_tokens(gold);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    if ((i + 1) % static_cast<std::size_t>(period) == 0) {
      out += kNoiseToken;
    } else {
      out += tokens[i];
    }
  }
  return out;
}

int noise_period(const std::string& endpoint) {
  const std::string rate_text = endpoint.substr(std::string_view("mock:noise:").size());
  double rate = 0.0;
  try {
    rate = std::stod(rate_text);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad noise rate in endpoint: " + endpoint);
  }
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("noise rate must be in (0, 1]: " + endpoint);
  }
  return std::max(1, static_cast<int>(std::llround(1.0 / rate)));
}

class EchoTranslator final : public TranslatorClient {
 public:
  explicit EchoTranslator(MockGold gold) : gold_(std::move(gold)) {}

  std::string translate(const prompting::PromptBundle& bundle) override {
    const std::string transcript = transcript_of_prompt(bundle.user);
    const auto it = gold_.translation_by_transcript.find(transcript);
    if (it == gold_.translation_by_transcript.end()) {
      throw ClientUnavailable("mock:echo has no gold translation for transcript: " + transcript);
    }
    return it->second;
  }

 private:
  MockGold gold_;
};

class GlossTranslator final : public TranslatorClient {
 public:
  std::string translate(const prompting::PromptBundle& bundle) override {
    std::string out;
    for (const std::string& gloss : glosses_of_prompt(bundle.user)) {
      if (!out.empty()) out.push_back(' ');
      out += gloss;
    }
    return out;
  }
};

class NoiseTranslator final : public TranslatorClient {
 public:
  NoiseTranslator(MockGold gold, int period) : gold_(std::move(gold)), period_(period) {}

  std::string translate(const prompting::PromptBundle& bundle) override {
    const std::string transcript = transcript_of_prompt(bundle.user);
    const auto it = gold_.translation_by_transcript.find(transcript);
    if (it == gold_.translation_by_transcript.end()) {
      throw ClientUnavailable("mock:noise has no gold translation for transcript: " + transcript);
    }
    return corrupt(it->second, period_);
  }

 private:
  MockGold gold_;
  int period_;
};

class EchoTranscriber final : public TranscriberClient {
 public:
  explicit EchoTranscriber(MockGold gold) : gold_(std::move(gold)) {}

  std::string transcribe(const std::string& audio_ref, const std::string&) override {
    const auto it = gold_.transcription_by_audio.find(audio_ref);
    if (it == gold_.transcription_by_audio.end()) {
      throw ClientUnavailable("mock:echo has no gold transcription for audio: " + audio_ref);
    }
    return it->second;
  }

 private:
  MockGold gold_;
};

class NoiseTranscriber final : public TranscriberClient {
 public:
  NoiseTranscriber(MockGold gold, int period) : gold_(std::move(gold)), period_(period) {}

  std::string transcribe(const std::string& audio_ref, const std::string&) override {
    const auto it = gold_.transcription_by_audio.find(audio_ref);
    if (it == gold_.transcription_by_audio.end()) {
      throw ClientUnavailable("mock:noise has no gold transcription for audio: " + audio_ref);
    }
    return corrupt(it->second, period_);
  }

 private:
  MockGold gold_;
  int period_;
};

bool is_http(const std::string& endpoint) {
  return endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0;
}

}  // namespace

std::string transcript_of_prompt(std::string_view user_prompt) {
  if (user_prompt.substr(0, kTranscriptionPrefix.size()) != kTranscriptionPrefix) {
    throw MalformedRecord("user prompt does not start with the transcription prefix");
  }
  const std::size_t marker = user_prompt.find(kEntriesMarker, kTranscriptionPrefix.size());
  if (marker == std::string_view::npos) {
    throw MalformedRecord("user prompt has no lexicon entries section");
  }
  return std::string(
      user_prompt.substr(kTranscriptionPrefix.size(), marker - kTranscriptionPrefix.size()));
}

std::vector<std::string> glosses_of_prompt(std::string_view user_prompt) {
  const std::size_t marker = user_prompt.find(kEntriesMarker);
  if (marker == std::string_view::npos) {
    throw MalformedRecord("user prompt has no lexicon entries section");
  }
  const std::string_view entries = user_prompt.substr(marker + kEntriesMarker.size());
  std::vector<std::string> out;
  if (entries == "none") return out;
  std::size_t start = 0;
  while (start <= entries.size()) {
    std::size_t end = entries.find("; ", start);
    if (end == std::string_view::npos) end = entries.size();
    const std::string_view entry = entries.substr(start, end - start);
    // entry reads `<form> (<cer>), <pos>, <gloss>`; the gloss may itself
    // contain ", ", so only the first two separators are structural
    const std::size_t p1 = entry.find(", ");
    const std::size_t p2 = p1 == std::string_view::npos ? p1 : entry.find(", ", p1 + 2);
    if (p2 != std::string_view::npos) {
      out.emplace_back(entry.substr(p2 + 2));
    }
    if (end == entries.size()) break;
    start = end + 2;
  }
  return out;
}

std::unique_ptr<TranslatorClient> make_translator(const std::string& endpoint,
                                                  const HttpOptions& options, MockGold gold) {
  if (endpoint == "mock:echo") return std::make_unique<EchoTranslator>(std::move(gold));
  if (endpoint == "mock:gloss") return std::make_unique<GlossTranslator>();
  if (endpoint.rfind("mock:noise:", 0) == 0) {
    return std::make_unique<NoiseTranslator>(std::move(gold), noise_period(endpoint));
  }
  if (is_http(endpoint)) {
    return std::make_unique<HttpTranslator>(split_endpoint(endpoint), options);
  }
  throw std::invalid_argument("unknown translator endpoint: " + endpoint);
}

std::unique_ptr<TranscriberClient> make_transcriber(const std::string& endpoint,
                                                    const HttpOptions& options, MockGold gold) {
  if (endpoint == "mock:echo") return std::make_unique<EchoTranscriber>(std::move(gold));
  if (endpoint.rfind("mock:noise:", 0) == 0) {
    return std::make_unique<NoiseTranscriber>(std::move(gold), noise_period(endpoint));
  }
  if (endpoint == "mock:gloss") {
    throw std::invalid_argument("mock:gloss is translator-only");
  }
  if (is_http(endpoint)) {
    return std::make_unique<HttpTranscriber>(split_endpoint(endpoint), options);
  }
  throw std::invalid_argument("unknown transcriber endpoint: " + endpoint);
}

}  // namespace warden::clients
