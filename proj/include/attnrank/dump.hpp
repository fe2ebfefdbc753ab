#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace attnrank {

/// Prompt construction convention recorded in a dump header.
enum class Ordering { kReversed };

std::string to_string(Ordering ordering);
Ordering parse_ordering(const std::string& text);

/// Per-(layer, document) attention mass received from query tokens in one
/// forward pass, summed over heads, query tokens and document tokens.
///
/// The matrix is stored layer-major: value(l, d) = matrix[l * num_docs + d].
struct AttentionDump {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::string model_name;
  std::uint32_t num_layers = 0;
  std::uint32_t num_heads = 0;
  std::uint32_t query_token_count = 0;
  std::vector<std::uint32_t> doc_token_counts;
  bool calibration = false;  // produced from the content-free query
  Ordering ordering = Ordering::kReversed;
  std::vector<float> matrix;

  std::size_t num_docs() const { return doc_ids.size(); }
  float value(std::size_t layer, std::size_t doc) const {
    return matrix[layer * num_docs() + doc];
  }
  float& value(std::size_t layer, std::size_t doc) {
    return matrix[layer * num_docs() + doc];
  }
  std::span<const float> layer_row(std::size_t layer) const {
    return std::span<const float>(matrix).subspan(layer * num_docs(), num_docs());
  }
  /// Upper bound on the attention mass a single layer can distribute.
  double mass_bound() const {
    return static_cast<double>(num_heads) * static_cast<double>(query_token_count);
  }

  bool operator==(const AttentionDump&) const = default;
};

inline constexpr std::uint8_t kIcraMagic[4] = {0x49, 0x43, 0x52, 0x41};  // "ICRA"
inline constexpr std::uint32_t kIcraVersion = 1;

/// Throws FormatError describing the first violated invariant.
void validate_dump(const AttentionDump& dump);

/// Serializes `dump` in ICRA v1 format. Returns the number of bytes written.
std::size_t write_dump(const AttentionDump& dump, std::ostream& sink);
AttentionDump read_dump(std::istream& source);

std::vector<std::uint8_t> encode_dump(const AttentionDump& dump);
AttentionDump decode_dump(std::span<const std::uint8_t> bytes);

void write_dump_file(const AttentionDump& dump, const std::filesystem::path& path);
AttentionDump read_dump_file(const std::filesystem::path& path);

/// Checks that `null` is a valid calibration partner for `real`.
void validate_pair(const AttentionDump& real, const AttentionDump& null);

}  // namespace attnrank
