#include "output.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "invaria/error.hpp"
#include "version.hpp"

namespace invaria::cli {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error("cannot create output directory '" + root_.string() + "': " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto path = root_ / name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << content;
  if (!os) throw Error("cannot write '" + path.string() + "'");
  sums_[name] = sha256_hex(content);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& j) {
  write(name, j.dump(2) + "\n");
}

void OutputDir::write_manifest(std::string_view command, const nlohmann::json& config) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, sum] : sums_) files[name] = {{"sha256", sum}};
  const nlohmann::json m{{"tool", "invaria"},
                         {"version", kVersion},
                         {"command", command},
                         {"config", config},
                         {"files", files}};
  const auto path = root_ / "manifest.json";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << m.dump(2) << "\n";
  if (!os) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace invaria::cli
