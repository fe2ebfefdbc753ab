#include "attnrank/dump_scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "attnrank/icr.hpp"

namespace attnrank {

namespace {

AttentionDump project(const AttentionDump& whole, const std::vector<std::string>& doc_ids) {
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t d = 0; d < whole.num_docs(); ++d) column[whole.doc_ids[d]] = d;

  AttentionDump out = whole;
  out.doc_ids = doc_ids;
  out.doc_token_counts.clear();
  out.matrix.assign(std::size_t{whole.num_layers} * doc_ids.size(), 0.0f);
  for (std::size_t j = 0; j < doc_ids.size(); ++j) {
    auto it = column.find(doc_ids[j]);
    if (it == column.end()) {
      throw Error("doc " + doc_ids[j] + " is not in the dump for query " + whole.query_id);
    }
    out.doc_token_counts.push_back(whole.doc_token_counts[it->second]);
    for (std::size_t l = 0; l < whole.num_layers; ++l) {
      out.value(l, j) = whole.value(l, it->second);
    }
  }
  return out;
}

}  // namespace

std::string subset_hash(const std::vector<std::string>& doc_ids) {
  std::uint64_t h = fnv1a("");
  for (const auto& id : doc_ids) {
    h = fnv1a(id, h);
    h = fnv1a("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DumpStore::DumpStore(std::filesystem::path dir, bool allow_projection)
    : dir_(std::move(dir)), allow_projection_(allow_projection) {}

std::filesystem::path DumpStore::whole_path(const std::string& query_id, bool null) const {
  return dir_ / (query_id + (null ? ".null.icra" : ".icra"));
}

std::filesystem::path DumpStore::subset_path(const std::string& query_id,
                                             const std::vector<std::string>& doc_ids,
                                             bool null) const {
  return dir_ / (query_id + "." + subset_hash(doc_ids) + (null ? ".null.icra" : ".icra"));
}

std::shared_ptr<const AttentionDump> DumpStore::load(const std::filesystem::path& path) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(path); it != cache_.end()) return it->second;
  }
  auto dump = std::make_shared<const AttentionDump>(read_dump_file(path));
  std::lock_guard lock(mutex_);
  return cache_.emplace(path, std::move(dump)).first->second;
}

DumpStore::Pair DumpStore::whole(const std::string& query_id, bool with_null) {
  Pair p;
  p.real = load(whole_path(query_id, false));
  if (with_null) p.null = load(whole_path(query_id, true));
  return p;
}

DumpStore::Pair DumpStore::subset(const std::string& query_id,
                                  const std::vector<std::string>& doc_ids, bool with_null) {
  const auto real_path = subset_path(query_id, doc_ids, false);
  if (std::filesystem::exists(real_path)) {
    Pair p;
    p.real = load(real_path);
    if (with_null) p.null = load(subset_path(query_id, doc_ids, true));
    return p;
  }

  Pair w = whole(query_id, with_null);
  const std::set<std::string> wanted(doc_ids.begin(), doc_ids.end());
  const std::set<std::string> have(w.real->doc_ids.begin(), w.real->doc_ids.end());
  if (wanted == have && wanted.size() == doc_ids.size()) return w;
  if (!allow_projection_) {
    throw Error("no dump for a " + std::to_string(doc_ids.size()) + "-document subset of query " +
                query_id + " (expected " + real_path.string() + ")");
  }
  Pair p;
  p.real = std::make_shared<const AttentionDump>(project(*w.real, doc_ids));
  if (with_null) p.null = std::make_shared<const AttentionDump>(project(*w.null, doc_ids));
  return p;
}

DumpAttentionScorer::DumpAttentionScorer(DumpStore& store, LayerInterval interval,
                                         bool calibrated)
    : store_(store), interval_(interval), calibrated_(calibrated) {}

std::string DumpAttentionScorer::name() const { return icr_tag(interval_, calibrated_); }

ScoreMap DumpAttentionScorer::score(const Query& query, std::span<const Document> docs) {
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& d : docs) ids.push_back(d.id);
  const auto pair = store_.subset(query.id, ids, calibrated_);
  const CalibratedMatrix m = calibrated_ ? calibrate(*pair.real, *pair.null)
                                         : uncalibrated(*pair.real);
  const ScoreMap all = aggregate_layers(m, interval_).to_map();
  ScoreMap out;
  out.reserve(docs.size());
  for (const auto& id : ids) out[id] = all.at(id);
  return out;
}

}  // namespace attnrank
