#include "attnrank/adapter.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include "json.hpp"

namespace attnrank {

namespace {

using json = nlohmann::json;

json request_body(const char* op, AdapterMode mode, const Query& query,
                  std::span<const Document> docs) {
  json ids = json::array();
  json texts = json::array();
  for (const auto& d : docs) {
    ids.push_back(d.id);
    texts.push_back(d.text);
  }
  return json{{"op", op},         {"mode", to_string(mode)}, {"query_id", query.id},
              {"query", query.text}, {"doc_ids", ids},       {"docs", texts}};
}

json parse_response(const std::string& line) {
  json r = json::parse(line, nullptr, false);
  if (r.is_discarded() || !r.is_object()) {
    throw Error("adapter response is not a JSON object: " + line);
  }
  if (auto err = r.find("error"); err != r.end()) {
    throw Error("adapter error: " + (err->is_string() ? err->get<std::string>() : err->dump()));
  }
  return r;
}

}  // namespace

std::string to_string(AdapterMode mode) {
  return mode == AdapterMode::kLikelihood ? "likelihood" : "generation";
}

AdapterMode parse_adapter_mode(const std::string& text) {
  if (text == "likelihood") return AdapterMode::kLikelihood;
  if (text == "generation") return AdapterMode::kGeneration;
  throw Error("unknown adapter mode '" + text + "'");
}

AdapterProcess::AdapterProcess(const std::string& command) {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  // A dead adapter must surface as a write error, not kill the engine.
  std::signal(SIGPIPE, SIG_IGN);

  pid_ = ::fork();
  if (pid_ < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  to_child_ = ::fdopen(in_pipe[1], "w");
  from_child_ = ::fdopen(out_pipe[0], "r");
}

AdapterProcess::~AdapterProcess() {
  if (to_child_ != nullptr) std::fclose(to_child_);
  if (from_child_ != nullptr) std::fclose(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

std::string AdapterProcess::request(const std::string& line) {
  if (std::fputs(line.c_str(), to_child_) == EOF || std::fputc('\n', to_child_) == EOF ||
      std::fflush(to_child_) != 0) {
    throw Error("adapter process is not accepting requests");
  }
  std::string response;
  int ch;
  while ((ch = std::fgetc(from_child_)) != EOF && ch != '\n') response += static_cast<char>(ch);
  if (ch == EOF && response.empty()) throw Error("adapter process exited");
  return response;
}

AdapterOracle::AdapterOracle(AdapterProcess& process, AdapterMode mode)
    : process_(process), mode_(mode) {}

std::size_t AdapterOracle::select(const Query& query, std::span<const Document> set) {
  const json r =
      parse_response(process_.request(request_body("setwise", mode_, query, set).dump()));
  auto winner = r.find("winner");
  if (winner == r.end() || !winner->is_number_integer()) {
    throw Error("unparseable oracle output");
  }
  last_distribution_.clear();
  if (auto dist = r.find("distribution"); dist != r.end() && dist->is_array()) {
    last_distribution_ = dist->get<std::vector<double>>();
  }
  const auto w = winner->get<long long>();
  // The framework reports out-of-range indices; keep them visible.
  return w < 0 ? set.size() : static_cast<std::size_t>(w);
}

AdapterScorer::AdapterScorer(AdapterProcess& process, AdapterMode mode)
    : process_(process), mode_(mode) {}

ScoreMap AdapterScorer::score(const Query& query, std::span<const Document> docs) {
  const json r =
      parse_response(process_.request(request_body("listwise", mode_, query, docs).dump()));
  auto scores = r.find("scores");
  if (scores == r.end() || !scores->is_array() || scores->size() != docs.size()) {
    throw Error("adapter returned no score list for query " + query.id);
  }
  ScoreMap out;
  for (std::size_t i = 0; i < docs.size(); ++i) out[docs[i].id] = (*scores)[i].get<double>();
  return out;
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    json line{{"query_id", e.query.id}, {"query", e.query.text}, {"doc_ids", e.doc_ids},
              {"mode", "icr"},          {"null", e.null_query},  {"max_words", e.max_words},
              {"out", e.output_path}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace attnrank
