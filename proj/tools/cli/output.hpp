#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace invaria::cli {

std::string sha256_hex(std::string_view data);

/// Collects emitted artifacts and their checksums. Files are written
/// synchronously from the calling thread.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);

  /// manifest.json: tool, version, command, config echo and per-file sha256.
  /// Contains no timestamps so identical runs give identical manifests.
  void write_manifest(std::string_view command, const nlohmann::json& config);

  const std::map<std::string, std::string>& checksums() const noexcept { return sums_; }

 private:
  std::filesystem::path root_;
  std::map<std::string, std::string> sums_;
};

}  // namespace invaria::cli
