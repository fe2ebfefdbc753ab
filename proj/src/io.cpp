#include "attnrank/io.hpp"

#include <fstream>
#include <sstream>

namespace attnrank {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw Error("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::map<std::string, std::string> parse_id_text_tsv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("line " + std::to_string(line_no) + ": expected id<TAB>text");
    }
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace attnrank
