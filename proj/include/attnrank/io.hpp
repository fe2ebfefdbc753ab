#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "attnrank/core.hpp"

namespace attnrank {

/// Raised when an input path does not exist or cannot be read.
class MissingFile : public Error {
 public:
  explicit MissingFile(const std::filesystem::path& path)
      : Error("cannot open " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// "id<TAB>text" lines, as used for query and document collections.
std::map<std::string, std::string> parse_id_text_tsv(const std::string& text);

}  // namespace attnrank
