#include "warden/eaf.hpp"

#include <expat.h>

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "warden/text.hpp"

namespace warden::eaf {

namespace {

struct Node {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<Node>> children;
  std::string text;

  const std::string* attr(const std::string& key) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }
};

struct TreeBuilder {
  std::unique_ptr<Node> root;
  std::vector<Node*> stack;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<TreeBuilder*>(user);
  auto node = std::make_unique<Node>();
  node->name = name;
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    node->attrs.emplace(attrs[i], attrs[i + 1]);
  }
  Node* raw = node.get();
  if (b->stack.empty()) {
    b->root = std::move(node);
  } else {
    b->stack.back()->children.push_back(std::move(node));
  }
  b->stack.push_back(raw);
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto* b = static_cast<TreeBuilder*>(user);
  if (!b->stack.empty()) b->stack.pop_back();
}

void XMLCALL on_chardata(void* user, const XML_Char* data, int len) {
  auto* b = static_cast<TreeBuilder*>(user);
  if (!b->stack.empty()) b->stack.back()->text.append(data, static_cast<std::size_t>(len));
}

std::unique_ptr<Node> parse_xml(std::string_view document) {
  TreeBuilder builder;
  XML_Parser parser = XML_ParserCreate(nullptr);
  XML_SetUserData(parser, &builder);
  XML_SetElementHandler(parser, on_start, on_end);
  XML_SetCharacterDataHandler(parser, on_chardata);
  const XML_Status status =
      XML_Parse(parser, document.data(), static_cast<int>(document.size()), 1);
  if (status == XML_STATUS_ERROR) {
    std::ostringstream msg;
    msg << "XML error at line " << XML_GetCurrentLineNumber(parser) << ": "
        << XML_ErrorString(XML_GetErrorCode(parser));
    XML_ParserFree(parser);
    throw MalformedDocument(msg.str());
  }
  XML_ParserFree(parser);
  if (!builder.root) {
    throw MalformedDocument("document has no root element");
  }
  return std::move(builder.root);
}

const Node* find_child(const Node& node, std::string_view name) {
  for (const auto& child : node.children) {
    if (child->name == name) return child.get();
  }
  return nullptr;
}

const Node* find_tier(const Node& root, std::string_view tier_name) {
  const Node* loose_match = nullptr;
  for (const auto& child : root.children) {
    if (child->name != "TIER") continue;
    const std::string* id = child->attr("TIER_ID");
    if (id == nullptr) continue;
    if (*id == tier_name) return child.get();
    if (loose_match == nullptr && text::iequals_ascii(*id, tier_name)) {
      loose_match = child.get();
    }
  }
  return loose_match;
}

struct AnnotationRecord {
  std::string tier_id;
  bool alignable = false;
  std::string ref;    // ANNOTATION_REF for reference annotations
  std::string value;  // ANNOTATION_VALUE text
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

std::string annotation_value(const Node& ann) {
  const Node* value = find_child(ann, "ANNOTATION_VALUE");
  return value == nullptr ? std::string() : text::collapse_whitespace(value->text);
}

}  // namespace

std::vector<corpus::Utterance> parse_eaf(std::string_view document, std::string_view source_file,
                                         std::string_view transcription_tier,
                                         std::string_view translation_tier) {
  if (source_file.empty()) {
    throw std::invalid_argument("parse_eaf: source_file must be named");
  }

  const std::unique_ptr<Node> root = parse_xml(document);
  if (root->name != "ANNOTATION_DOCUMENT") {
    throw MalformedDocument("root element is " + root->name + ", expected ANNOTATION_DOCUMENT");
  }

  const Node* time_order = find_child(*root, "TIME_ORDER");
  if (time_order == nullptr) {
    throw MalformedDocument("document has no TIME_ORDER block");
  }
  std::map<std::string, std::optional<std::int64_t>> slots;
  for (const auto& slot : time_order->children) {
    if (slot->name != "TIME_SLOT") continue;
    const std::string* id = slot->attr("TIME_SLOT_ID");
    if (id == nullptr) continue;
    const std::string* value = slot->attr("TIME_VALUE");
    if (value == nullptr) {
      slots[*id] = std::nullopt;  // unaligned slot
    } else {
      try {
        slots[*id] = std::stoll(*value);
      } catch (const std::exception&) {
        throw MalformedDocument("TIME_SLOT " + *id + " has non-numeric TIME_VALUE '" + *value + "'");
      }
    }
  }

  auto resolve_slot = [&slots](const std::string& ref, const std::string& annotation_id) {
    const auto it = slots.find(ref);
    if (it == slots.end() || !it->second.has_value()) {
      throw UnresolvedTimeSlot("annotation " + annotation_id + " references undefined time slot '" +
                               ref + "'");
    }
    return *it->second;
  };

  const Node* src_tier = find_tier(*root, transcription_tier);
  if (src_tier == nullptr) {
    throw MissingTier("transcription tier '" + std::string(transcription_tier) + "' not found");
  }
  const Node* dst_tier = find_tier(*root, translation_tier);
  if (dst_tier == nullptr) {
    throw MissingTier("translation tier '" + std::string(translation_tier) + "' not found");
  }

  // index every annotation in the document so reference chains can be
  // followed across intermediate tiers
  std::map<std::string, AnnotationRecord> annotations;
  for (const auto& tier : root->children) {
    if (tier->name != "TIER") continue;
    const std::string* tier_id = tier->attr("TIER_ID");
    for (const auto& wrapper : tier->children) {
      if (wrapper->name != "ANNOTATION") continue;
      for (const auto& ann : wrapper->children) {
        const std::string* id = ann->attr("ANNOTATION_ID");
        if (id == nullptr) continue;
        AnnotationRecord rec;
        rec.tier_id = tier_id == nullptr ? "" : *tier_id;
        rec.value = annotation_value(*ann);
        if (ann->name == "ALIGNABLE_ANNOTATION") {
          rec.alignable = true;
          const std::string* ref1 = ann->attr("TIME_SLOT_REF1");
          const std::string* ref2 = ann->attr("TIME_SLOT_REF2");
          if (ref1 == nullptr || ref2 == nullptr) {
            throw MalformedDocument("alignable annotation " + *id + " lacks time slot references");
          }
          rec.start_ms = resolve_slot(*ref1, *id);
          rec.end_ms = resolve_slot(*ref2, *id);
        } else if (ann->name == "REF_ANNOTATION") {
          const std::string* ref = ann->attr("ANNOTATION_REF");
          rec.ref = ref == nullptr ? "" : *ref;
        } else {
          continue;
        }
        annotations.emplace(*id, std::move(rec));
      }
    }
  }

  // utterances from the transcription tier, keyed by annotation id
  const std::string* src_tier_id = src_tier->attr("TIER_ID");
  std::vector<corpus::Utterance> utterances;
  std::map<std::string, std::size_t> by_annotation_id;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> by_span;
  for (const auto& [id, rec] : annotations) {
    if (!rec.alignable || src_tier_id == nullptr || rec.tier_id != *src_tier_id) continue;
    if (rec.value.empty() || rec.end_ms <= rec.start_ms) continue;  // unusable annotation
    corpus::Utterance u;
    u.id = std::string(source_file) + "#" + id;
    u.source_file = std::string(source_file);
    u.start_ms = rec.start_ms;
    u.end_ms = rec.end_ms;
    u.transcription = rec.value;
    by_annotation_id[id] = utterances.size();
    by_span.emplace(std::make_pair(rec.start_ms, rec.end_ms), utterances.size());
    utterances.push_back(std::move(u));
  }

  // attach translations: annotation references first, exact spans second
  const std::string* dst_tier_id = dst_tier->attr("TIER_ID");
  for (const auto& [id, rec] : annotations) {
    if (dst_tier_id == nullptr || rec.tier_id != *dst_tier_id || rec.value.empty()) continue;
    std::size_t target = utterances.size();
    if (rec.alignable) {
      const auto it = by_span.find(std::make_pair(rec.start_ms, rec.end_ms));
      if (it != by_span.end()) target = it->second;
    } else {
      std::string cursor = rec.ref;
      std::set<std::string> seen;
      while (!cursor.empty() && seen.insert(cursor).second) {
        const auto hit = by_annotation_id.find(cursor);
        if (hit != by_annotation_id.end()) {
          target = hit->second;
          break;
        }
        const auto next = annotations.find(cursor);
        if (next == annotations.end()) break;
        cursor = next->second.ref;
      }
    }
    if (target < utterances.size() && utterances[target].translation.empty()) {
      utterances[target].translation = rec.value;
    }
  }

  std::sort(utterances.begin(), utterances.end(),
            [](const corpus::Utterance& a, const corpus::Utterance& b) {
              return std::tie(a.start_ms, a.end_ms, a.id) < std::tie(b.start_ms, b.end_ms, b.id);
            });
  return utterances;
}

}  // namespace warden::eaf
