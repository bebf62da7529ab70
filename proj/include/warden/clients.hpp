#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "warden/errors.hpp"
#include "warden/prompting.hpp"

namespace warden::clients {

// Speech-to-text service boundary. `language_token` is the decoder language
// tag forwarded verbatim (the pipeline default is the Sundanese tag "<su>").
class TranscriberClient {
 public:
  virtual ~TranscriberClient() = default;
  virtual std::string transcribe(const std::string& audio_ref,
                                 const std::string& language_token) = 0;
};

// Translation service boundary: one completion per prompt bundle. A timeout
// or transport failure surfaces as ClientUnavailable, never an empty string.
class TranslatorClient {
 public:
  virtual ~TranslatorClient() = default;
  virtual std::string translate(const prompting::PromptBundle& bundle) = 0;
};

struct HttpOptions {
  std::string model;              // forwarded in the request body when non-empty
  std::string api_key;            // sent as "Authorization: Bearer ..." when non-empty
  int timeout_seconds = 120;      // per request
  int max_retries = 3;            // retries after the first attempt
  int backoff_initial_ms = 250;   // doubled per retry
};

// Gold text backing the mock clients. Transcriptions are keyed by audio
// reference, translations by the exact transcript embedded in the prompt.
struct MockGold {
  std::map<std::string, std::string> transcription_by_audio;
  std::map<std::string, std::string> translation_by_transcript;
};

// Endpoint forms:
//   http(s)://host[:port]/path  — JSON POST {model, system, user} -> {text}
//                                 (transcriber: {audio_url, language} -> {text})
//   mock:echo                   — returns the gold text for the request
//   mock:gloss                  — translator only: concatenates the glosses
//                                 in the prompt's lexicon entries
//   mock:noise:<rate>           — gold text with every round(1/rate)-th token
//                                 replaced by a marker token
// Mocks need `gold`; HTTP endpoints ignore it.
std::unique_ptr<TranslatorClient> make_translator(const std::string& endpoint,
                                                  const HttpOptions& options = {},
                                                  MockGold gold = {});
std::unique_ptr<TranscriberClient> make_transcriber(const std::string& endpoint,
                                                    const HttpOptions& options = {},
                                                    MockGold gold = {});

// Pulls the transcript back out of a lexicon-conditioned user prompt
// ("Transcription: <t>. Lexicon entries: ..."); exposed for the mocks and
// for prompt/record consistency audits.
std::string transcript_of_prompt(std::string_view user_prompt);

// The glosses of a lexicon-conditioned user prompt, in order.
std::vector<std::string> glosses_of_prompt(std::string_view user_prompt);

// Marker substituted for dropped tokens by mock:noise.
inline constexpr std::string_view kNoiseToken = "zzznoise";

}  // namespace warden::clients
