#include "warden/phonology.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

#include "warden/csv.hpp"
#include "warden/text.hpp"

namespace warden::phonology {

namespace {

constexpr std::size_t kWordBits = 64;

long long parse_inventory_id(const std::string& raw) {
  try {
    return std::stoll(raw);
  } catch (const std::exception&) {
    return std::numeric_limits<long long>::max();
  }
}

}  // namespace

SegmentUniverse SegmentUniverse::from_inventories(
    const std::vector<const PhonemeInventory*>& inventories) {
  std::set<std::string> all;
  for (const PhonemeInventory* inv : inventories) {
    all.insert(inv->segments.begin(), inv->segments.end());
  }
  SegmentUniverse universe;
  universe.symbols_.assign(all.begin(), all.end());
  for (std::size_t i = 0; i < universe.symbols_.size(); ++i) {
    universe.index_.emplace(universe.symbols_[i], i);
  }
  return universe;
}

std::size_t SegmentUniverse::index_of(const std::string& symbol) const {
  const auto it = index_.find(symbol);
  if (it == index_.end()) {
    throw UnknownSegment("segment '" + symbol + "' is not in the universe");
  }
  return it->second;
}

bool SegmentUniverse::contains(const std::string& symbol) const { return index_.count(symbol) > 0; }

BitVector::BitVector(std::size_t bits) : bits_(bits), words_((bits + kWordBits - 1) / kWordBits, 0) {}

void BitVector::set(std::size_t i) { words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits); }

bool BitVector::test(std::size_t i) const {
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
}

std::size_t BitVector::popcount() const {
  std::size_t count = 0;
  for (std::uint64_t w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

std::size_t hamming(const BitVector& a, const BitVector& b) {
  if (a.bits_ != b.bits_) {
    throw LengthMismatch("hamming: vector lengths differ (" + std::to_string(a.bits_) + " vs " +
                         std::to_string(b.bits_) + ")");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.words_.size(); ++i) {
    count += static_cast<std::size_t>(std::popcount(a.words_[i] ^ b.words_[i]));
  }
  return count;
}

BitVector encode_binary(const PhonemeInventory& inventory, const SegmentUniverse& universe) {
  BitVector bits(universe.size());
  for (const std::string& segment : inventory.segments) {
    bits.set(universe.index_of(segment));
  }
  return bits;
}

std::set<std::string> decode_binary(const BitVector& bits, const SegmentUniverse& universe) {
  std::set<std::string> segments;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits.test(i)) segments.insert(universe.symbols()[i]);
  }
  return segments;
}

std::vector<PhonemeInventory> load_phoible(std::string_view csv_text, MergePolicy policy) {
  const auto rows = csv::parse(csv_text);
  if (rows.empty()) {
    throw EmptyTable("phoible table has no rows");
  }

  const std::vector<std::string>& header = rows.front();
  auto column = [&header](std::string_view name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::iequals_ascii(text::trim(header[i]), name)) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };

  const std::ptrdiff_t col_inventory = column("InventoryID");
  const std::ptrdiff_t col_glottocode = column("Glottocode");
  const std::ptrdiff_t col_iso = column("ISO6393");
  const std::ptrdiff_t col_name = column("LanguageName");
  const std::ptrdiff_t col_phoneme = column("Phoneme");
  if (col_phoneme < 0) throw MissingColumn("phoible table lacks a Phoneme column");
  if (col_name < 0) throw MissingColumn("phoible table lacks a LanguageName column");
  if (col_glottocode < 0 && col_iso < 0) {
    throw MissingColumn("phoible table lacks both Glottocode and ISO6393 columns");
  }
  if (rows.size() < 2) {
    throw EmptyTable("phoible table has a header but no data rows");
  }

  auto field = [](const std::vector<std::string>& row, std::ptrdiff_t idx) -> std::string {
    if (idx < 0 || static_cast<std::size_t>(idx) >= row.size()) return {};
    return text::trim(row[static_cast<std::size_t>(idx)]);
  };

  struct Accumulator {
    std::string name;
    std::string code;
    long long first_inventory_id = std::numeric_limits<long long>::max();
    std::set<std::string> union_segments;
    std::map<long long, std::set<std::string>> by_inventory;
  };
  std::map<std::string, Accumulator> by_code;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string code = field(row, col_iso);
    if (code.empty() || code == "NA") code = field(row, col_glottocode);
    if (code.empty() || code == "NA") continue;
    const std::string phoneme = text::nfc(field(row, col_phoneme));
    if (phoneme.empty()) continue;
    const long long inventory_id =
        col_inventory < 0 ? 0 : parse_inventory_id(field(row, col_inventory));

    Accumulator& acc = by_code[code];
    if (acc.code.empty()) {
      acc.code = code;
      acc.name = field(row, col_name);
    }
    acc.first_inventory_id = std::min(acc.first_inventory_id, inventory_id);
    acc.union_segments.insert(phoneme);
    acc.by_inventory[inventory_id].insert(phoneme);
  }

  std::vector<PhonemeInventory> inventories;
  inventories.reserve(by_code.size());
  for (auto& [code, acc] : by_code) {
    PhonemeInventory inv;
    inv.language_code = code;
    inv.language_name = acc.name;
    inv.segments = policy == MergePolicy::union_by_code
                       ? std::move(acc.union_segments)
                       : std::move(acc.by_inventory[acc.first_inventory_id]);
    if (!inv.segments.empty()) inventories.push_back(std::move(inv));
  }
  if (inventories.empty()) {
    throw EmptyTable("phoible table yielded no inventories");
  }
  return inventories;
}

const PhonemeInventory& find_language(const std::vector<PhonemeInventory>& inventories,
                                      std::string_view identifier) {
  for (const PhonemeInventory& inv : inventories) {
    if (inv.language_code == identifier) return inv;
  }
  for (const PhonemeInventory& inv : inventories) {
    if (text::iequals_ascii(inv.language_code, identifier)) return inv;
  }
  for (const PhonemeInventory& inv : inventories) {
    if (text::iequals_ascii(inv.language_name, identifier)) return inv;
  }
  throw UnknownLanguage("no inventory for language '" + std::string(identifier) + "'");
}

ProxyRanking rank_proxies(std::string_view target, const std::vector<std::string>& candidates,
                          const std::vector<PhonemeInventory>& inventories) {
  const PhonemeInventory& target_inv = find_language(inventories, target);

  std::vector<const PhonemeInventory*> candidate_invs;
  candidate_invs.reserve(candidates.size());
  for (const std::string& c : candidates) {
    candidate_invs.push_back(&find_language(inventories, c));
  }

  std::vector<const PhonemeInventory*> universe_members = candidate_invs;
  universe_members.push_back(&target_inv);
  const SegmentUniverse universe = SegmentUniverse::from_inventories(universe_members);
  const BitVector target_bits = encode_binary(target_inv, universe);

  ProxyRanking ranking;
  ranking.target = target_inv.language_code;
  ranking.universe_size = universe.size();
  for (const PhonemeInventory* inv : candidate_invs) {
    const std::size_t d = hamming(target_bits, encode_binary(*inv, universe));
    ProxyEntry entry;
    entry.language_code = inv->language_code;
    entry.language_name = inv->language_name;
    entry.distance = d;
    entry.normalized = universe.size() == 0 ? 0.0 : static_cast<double>(d) / universe.size();
    ranking.entries.push_back(std::move(entry));
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const ProxyEntry& a, const ProxyEntry& b) {
              return std::tie(a.distance, a.language_code) < std::tie(b.distance, b.language_code);
            });
  return ranking;
}

std::string render_ranking(const ProxyRanking& ranking) {
  auto pad = [](std::string s, std::size_t width) {
    while (s.size() < width) s.push_back(' ');
    return s;
  };
  std::ostringstream os;
  os << "target: " << ranking.target << "  universe: " << ranking.universe_size << " segments\n";
  os << pad("code", 12) << pad("name", 22) << pad("distance", 10) << "normalized\n";
  for (const ProxyEntry& e : ranking.entries) {
    os << pad(e.language_code, 12) << pad(e.language_name, 22)
       << pad(std::to_string(e.distance), 10) << text::format_fixed(e.normalized, 4) << "\n";
  }
  return os.str();
}

std::string ranking_to_csv(const ProxyRanking& ranking) {
  std::string out = "code,name,distance,normalized\n";
  for (const ProxyEntry& e : ranking.entries) {
    out += csv::escape_field(e.language_code) + "," + csv::escape_field(e.language_name) + "," +
           std::to_string(e.distance) + "," + text::format_fixed(e.normalized, 6) + "\n";
  }
  return out;
}

}  // namespace warden::phonology
