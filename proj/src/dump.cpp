#include "attnrank/dump.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "attnrank/core.hpp"
#include "attnrank/io.hpp"
#include "json.hpp"

namespace attnrank {

namespace {

using json = nlohmann::json;

// float32 rounding of per-token sums can push an exactly-saturated layer a
// hair over the bound.
constexpr double kMassSlack = 1e-6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

json header_of(const AttentionDump& dump) {
  return json{{"query_id", dump.query_id},
              {"doc_ids", dump.doc_ids},
              {"model", dump.model_name},
              {"num_layers", dump.num_layers},
              {"num_heads", dump.num_heads},
              {"query_token_count", dump.query_token_count},
              {"doc_token_counts", dump.doc_token_counts},
              {"calibration", dump.calibration},
              {"ordering", to_string(dump.ordering)}};
}

template <typename T>
T header_field(const json& header, const char* key) {
  auto it = header.find(key);
  if (it == header.end()) {
    throw FormatError(std::string("header missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("header field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::kReversed:
      return "reversed";
  }
  return "unknown";
}

Ordering parse_ordering(const std::string& text) {
  if (text == "reversed") return Ordering::kReversed;
  throw FormatError("unknown ordering '" + text + "'");
}

void validate_dump(const AttentionDump& dump) {
  if (dump.num_layers == 0) throw FormatError("num_layers must be positive");
  if (dump.num_heads == 0) throw FormatError("num_heads must be positive");
  if (dump.query_token_count == 0) throw FormatError("query_token_count must be positive");
  if (dump.doc_token_counts.size() != dump.doc_ids.size()) {
    throw FormatError("doc_token_counts length does not match doc_ids");
  }
  if (dump.matrix.size() != std::size_t{dump.num_layers} * dump.num_docs()) {
    throw FormatError("matrix dimensions do not match header counts");
  }
  const double bound = dump.mass_bound();
  for (std::size_t l = 0; l < dump.num_layers; ++l) {
    double mass = 0.0;
    for (std::size_t d = 0; d < dump.num_docs(); ++d) {
      const float v = dump.value(l, d);
      if (!std::isfinite(v)) {
        throw FormatError("non-finite matrix entry at layer " + std::to_string(l) +
                          ", doc " + dump.doc_ids[d]);
      }
      if (v < 0.0f) {
        throw FormatError("negative matrix entry at layer " + std::to_string(l) +
                          ", doc " + dump.doc_ids[d]);
      }
      mass += v;
    }
    if (mass > bound * (1.0 + kMassSlack)) {
      throw FormatError("layer " + std::to_string(l) + " attention mass " +
                        std::to_string(mass) + " exceeds num_heads * query_token_count = " +
                        std::to_string(bound));
    }
  }
}

std::vector<std::uint8_t> encode_dump(const AttentionDump& dump) {
  validate_dump(dump);
  const std::string header = header_of(dump).dump();

  std::vector<std::uint8_t> out;
  out.reserve(12 + header.size() + 4 * dump.matrix.size());
  for (std::uint8_t b : kIcraMagic) out.push_back(b);
  put_u32(out, kIcraVersion);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  for (float v : dump.matrix) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

AttentionDump decode_dump(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kIcraMagic, 4) != 0) {
    throw FormatError("not an ICRA file");
  }
  if (bytes.size() < 12) throw FormatError("truncated header");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kIcraVersion) {
    throw FormatError("unsupported version " + std::to_string(version));
  }
  const std::uint32_t header_len = get_u32(bytes, 8);
  if (bytes.size() - 12 < header_len) throw FormatError("truncated header");

  const auto* header_begin = reinterpret_cast<const char*>(bytes.data() + 12);
  json header = json::parse(header_begin, header_begin + header_len, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw FormatError("header is not a well-formed JSON object");
  }

  AttentionDump dump;
  dump.query_id = header_field<std::string>(header, "query_id");
  dump.doc_ids = header_field<std::vector<std::string>>(header, "doc_ids");
  dump.model_name = header_field<std::string>(header, "model");
  dump.num_layers = header_field<std::uint32_t>(header, "num_layers");
  dump.num_heads = header_field<std::uint32_t>(header, "num_heads");
  dump.query_token_count = header_field<std::uint32_t>(header, "query_token_count");
  dump.doc_token_counts = header_field<std::vector<std::uint32_t>>(header, "doc_token_counts");
  dump.calibration = header_field<bool>(header, "calibration");
  dump.ordering = parse_ordering(header_field<std::string>(header, "ordering"));

  const std::size_t count = std::size_t{dump.num_layers} * dump.num_docs();
  const std::size_t payload = bytes.size() - 12 - header_len;
  if (payload < 4 * count) throw FormatError("truncated payload");
  if (payload > 4 * count) throw FormatError("unexpected trailing bytes after payload");

  dump.matrix.resize(count);
  const std::size_t base = 12 + header_len;
  for (std::size_t i = 0; i < count; ++i) {
    dump.matrix[i] = std::bit_cast<float>(get_u32(bytes, base + 4 * i));
  }
  validate_dump(dump);
  return dump;
}

std::size_t write_dump(const AttentionDump& dump, std::ostream& sink) {
  const auto bytes = encode_dump(dump);
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error("failed writing ICRA dump");
  return bytes.size();
}

AttentionDump read_dump(std::istream& source) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(source)),
                                  std::istreambuf_iterator<char>());
  return decode_dump(bytes);
}

void write_dump_file(const AttentionDump& dump, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_dump(dump, out);
}

AttentionDump read_dump_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  try {
    return read_dump(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void validate_pair(const AttentionDump& real, const AttentionDump& null) {
  if (real.doc_ids != null.doc_ids) throw Error("doc_ids mismatch");
  if (real.num_layers != null.num_layers) throw Error("num_layers mismatch");
  if (real.calibration) throw Error("real dump flagged as calibration");
  if (!null.calibration) throw Error("null dump not flagged");
}

}  // namespace attnrank
