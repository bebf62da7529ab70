#include "warden/lexicon.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "warden/csv.hpp"
#include "warden/text.hpp"

namespace warden::lexicon {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string canon(std::string_view raw) { return text::nfc(text::trim(raw)); }

std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t end = cell.find('|', start);
    if (end == std::string_view::npos) end = cell.size();
    const std::string item = canon(cell.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    if (end == cell.size()) break;
    start = end + 1;
  }
  return out;
}

std::vector<Example> split_examples(std::string_view cell) {
  std::vector<Example> out;
  for (const std::string& item : split_list(cell)) {
    const std::size_t arrow = item.find("=>");
    if (arrow == std::string::npos) {
      out.push_back(Example{item, ""});
    } else {
      out.push_back(Example{text::trim(item.substr(0, arrow)), text::trim(item.substr(arrow + 2))});
    }
  }
  return out;
}

std::string make_entry_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "e%04zu", index);
  return buf;
}

void finalize_entry(LexiconEntry& entry, std::size_t index, std::vector<std::string>* warnings) {
  entry.headword = canon(entry.headword);
  entry.pos = canon(entry.pos);
  entry.gloss = canon(entry.gloss);
  if (entry.headword.empty()) {
    throw MissingField("lexicon record " + std::to_string(index) + " has no headword");
  }
  if (entry.gloss.empty()) {
    throw MissingField("lexicon record " + std::to_string(index) + " ('" + entry.headword +
                       "') has no gloss");
  }
  if (entry.entry_id.empty()) entry.entry_id = make_entry_id(index);
  entry.affix_kind = classify_affix(entry.headword);

  std::vector<std::string> variants;
  std::set<std::string> seen;
  for (std::string& v : entry.variants) {
    std::string c = canon(v);
    if (c.empty() || c == entry.headword || !seen.insert(c).second) continue;
    variants.push_back(std::move(c));
  }
  entry.variants = std::move(variants);

  if (warnings != nullptr && !entry.pos.empty()) {
    const std::string pos_lower = text::to_lower_ascii(entry.pos);
    const bool says_prefix = pos_lower.find("prefix") != std::string::npos;
    const bool says_suffix = pos_lower.find("suffix") != std::string::npos;
    if ((says_prefix && entry.affix_kind != AffixKind::prefix) ||
        (says_suffix && entry.affix_kind != AffixKind::suffix)) {
      warnings->push_back("entry '" + entry.headword + "' (" + entry.entry_id + "): pos '" +
                          entry.pos + "' disagrees with hyphen classification '" +
                          std::string(affix_kind_name(entry.affix_kind)) + "'");
    }
  }
}

Lexicon parse_csv(std::string_view table, std::vector<std::string>* warnings) {
  const auto rows = csv::parse(table);
  if (rows.empty()) {
    throw MalformedRecord("lexicon CSV is empty");
  }
  const auto& header = rows.front();
  auto column = [&header](std::string_view name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::iequals_ascii(text::trim(header[i]), name)) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  const std::ptrdiff_t col_headword = column("headword");
  const std::ptrdiff_t col_pos = column("pos");
  const std::ptrdiff_t col_gloss = column("gloss");
  const std::ptrdiff_t col_variants = column("variants");
  const std::ptrdiff_t col_examples = column("examples");
  if (col_headword < 0) throw MissingField("lexicon CSV lacks a headword column");
  if (col_gloss < 0) throw MissingField("lexicon CSV lacks a gloss column");

  auto field = [](const std::vector<std::string>& row, std::ptrdiff_t idx) -> std::string {
    if (idx < 0 || static_cast<std::size_t>(idx) >= row.size()) return {};
    return row[static_cast<std::size_t>(idx)];
  };

  std::vector<LexiconEntry> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    LexiconEntry entry;
    entry.headword = field(rows[r], col_headword);
    entry.pos = field(rows[r], col_pos);
    entry.gloss = field(rows[r], col_gloss);
    entry.variants = split_list(field(rows[r], col_variants));
    entry.examples = split_examples(field(rows[r], col_examples));
    finalize_entry(entry, entries.size(), warnings);
    entries.push_back(std::move(entry));
  }
  return Lexicon(std::move(entries));
}

Lexicon parse_json_lines(std::string_view table, std::vector<std::string>* warnings) {
  std::vector<LexiconEntry> entries;
  std::size_t start = 0;
  while (start < table.size()) {
    std::size_t end = table.find('\n', start);
    if (end == std::string_view::npos) end = table.size();
    std::string_view line = table.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (text::trim(line).empty()) continue;

    const ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw MalformedRecord("bad lexicon record: " + std::string(line.substr(0, 80)));
    }
    LexiconEntry entry;
    entry.entry_id = j.value("entry_id", std::string());
    entry.headword = j.value("headword", std::string());
    entry.pos = j.value("pos", std::string());
    entry.gloss = j.value("gloss", std::string());
    if (j.contains("variants")) {
      if (!j["variants"].is_array()) throw MalformedRecord("variants must be an array");
      for (const auto& v : j["variants"]) {
        if (!v.is_string()) throw MalformedRecord("variants must be strings");
        entry.variants.push_back(v.get<std::string>());
      }
    }
    if (j.contains("examples")) {
      if (!j["examples"].is_array()) throw MalformedRecord("examples must be an array");
      for (const auto& e : j["examples"]) {
        if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
          entry.examples.push_back(Example{e[0].get<std::string>(), e[1].get<std::string>()});
        } else {
          throw MalformedRecord("examples must be [source, target] pairs");
        }
      }
    }
    finalize_entry(entry, entries.size(), warnings);
    entries.push_back(std::move(entry));
  }
  return Lexicon(std::move(entries));
}

}  // namespace

std::string_view affix_kind_name(AffixKind kind) {
  switch (kind) {
    case AffixKind::stem:
      return "stem";
    case AffixKind::prefix:
      return "prefix";
    case AffixKind::suffix:
      return "suffix";
  }
  return "stem";
}

AffixKind classify_affix(std::string_view headword) {
  const bool leading = headword.size() >= 2 && headword.front() == '-';
  const bool trailing = headword.size() >= 2 && headword.back() == '-';
  if (trailing && !leading) return AffixKind::prefix;
  if (leading && !trailing) return AffixKind::suffix;
  return AffixKind::stem;
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_form_[entries_[i].headword].push_back(i);
    for (const std::string& v : entries_[i].variants) {
      auto& ids = by_form_[v];
      if (ids.empty() || ids.back() != i) ids.push_back(i);
    }
    by_id_.emplace(entries_[i].entry_id, i);
  }
}

const LexiconEntry* Lexicon::find_by_id(std::string_view entry_id) const {
  const auto it = by_id_.find(entry_id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<const LexiconEntry*> Lexicon::lookup_exact(std::string_view form) const {
  const std::string key = text::nfc(text::trim(form));
  const auto it = by_form_.find(key);
  std::vector<const LexiconEntry*> out;
  if (it == by_form_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&entries_[idx]);
  return out;
}

Lexicon parse_lexicon(std::string_view table, Format format, std::vector<std::string>* warnings) {
  return format == Format::csv ? parse_csv(table, warnings) : parse_json_lines(table, warnings);
}

std::string dump_lexicon(const Lexicon& lexicon) {
  std::vector<const LexiconEntry*> ordered;
  ordered.reserve(lexicon.size());
  for (const LexiconEntry& e : lexicon.entries()) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(), [](const LexiconEntry* a, const LexiconEntry* b) {
    return std::tie(a->headword, a->entry_id) < std::tie(b->headword, b->entry_id);
  });

  std::string out;
  for (const LexiconEntry* e : ordered) {
    ordered_json j;
    j["entry_id"] = e->entry_id;
    j["headword"] = e->headword;
    j["pos"] = e->pos;
    j["gloss"] = e->gloss;
    j["affix_kind"] = std::string(affix_kind_name(e->affix_kind));
    j["variants"] = e->variants;
    ordered_json examples = ordered_json::array();
    for (const Example& ex : e->examples) {
      examples.push_back(ordered_json::array({ex.source, ex.target}));
    }
    j["examples"] = std::move(examples);
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace warden::lexicon
