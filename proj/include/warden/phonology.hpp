#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "warden/errors.hpp"

namespace warden::phonology {

// A language's segment set as listed in a PHOIBLE-style table. Symbols are
// NFC-normalized so precomposed and combining-mark spellings compare equal.
struct PhonemeInventory {
  std::string language_name;
  std::string language_code;
  std::set<std::string> segments;
};

// Ordered basis for the binary encoding.
class SegmentUniverse {
 public:
  static SegmentUniverse from_inventories(const std::vector<const PhonemeInventory*>& inventories);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  // total over universe members; throws UnknownSegment otherwise
  std::size_t index_of(const std::string& symbol) const;
  bool contains(const std::string& symbol) const;

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t> index_;
};

// Word-packed presence vector over a SegmentUniverse.
class BitVector {
 public:
  explicit BitVector(std::size_t bits = 0);

  std::size_t size() const { return bits_; }
  void set(std::size_t i);
  bool test(std::size_t i) const;
  std::size_t popcount() const;

  friend std::size_t hamming(const BitVector& a, const BitVector& b);

 private:
  std::size_t bits_;
  std::vector<std::uint64_t> words_;
};

// Number of differing positions; equals the symmetric difference of the
// encoded segment sets. Throws LengthMismatch on unequal lengths.
std::size_t hamming(const BitVector& a, const BitVector& b);

BitVector encode_binary(const PhonemeInventory& inventory, const SegmentUniverse& universe);

// Inverse of encode_binary, for round-trip checks.
std::set<std::string> decode_binary(const BitVector& bits, const SegmentUniverse& universe);

enum class MergePolicy { union_by_code, first_inventory };

// Loads a PHOIBLE-style CSV (columns InventoryID, Glottocode or ISO6393,
// LanguageName, Phoneme). Rows are keyed by ISO 639-3 code when present,
// falling back to the Glottocode. One inventory per language code;
// union_by_code unions all doculects sharing a code, first_inventory keeps
// only the rows of the numerically smallest InventoryID.
std::vector<PhonemeInventory> load_phoible(std::string_view csv_text,
                                           MergePolicy policy = MergePolicy::union_by_code);

struct ProxyEntry {
  std::string language_code;
  std::string language_name;
  std::size_t distance = 0;
  double normalized = 0.0;
};

struct ProxyRanking {
  std::string target;
  std::size_t universe_size = 0;
  std::vector<ProxyEntry> entries;  // ascending distance, ties by code
};

// Resolves a language identifier against codes first, then names
// (case-insensitively). Throws UnknownLanguage.
const PhonemeInventory& find_language(const std::vector<PhonemeInventory>& inventories,
                                      std::string_view identifier);

// Ranks candidates by Hamming distance to the target over a universe built
// from target plus candidates. normalized = distance / universe size.
ProxyRanking rank_proxies(std::string_view target, const std::vector<std::string>& candidates,
                          const std::vector<PhonemeInventory>& inventories);

std::string render_ranking(const ProxyRanking& ranking);
std::string ranking_to_csv(const ProxyRanking& ranking);

}  // namespace warden::phonology
