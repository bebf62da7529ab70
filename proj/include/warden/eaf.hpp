#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "warden/corpus.hpp"

namespace warden::eaf {

// Extracts one utterance per alignable annotation on the transcription
// tier, in time order. Translations attach by annotation reference first,
// then by exact span match; otherwise they stay empty. Annotations on all
// other tiers are ignored. Utterance ids are "<source_file>#<annotation id>"
// so they stay unique across a multi-file corpus.
//
// Throws MalformedDocument, MissingTier (tier names are matched
// case-insensitively), UnresolvedTimeSlot.
std::vector<corpus::Utterance> parse_eaf(std::string_view document, std::string_view source_file,
                                         std::string_view transcription_tier = "transcription",
                                         std::string_view translation_tier = "translation");

}  // namespace warden::eaf
