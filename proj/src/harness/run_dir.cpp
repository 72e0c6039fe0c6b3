#include "molspo/harness/run_dir.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "molspo/harness/errors.hpp"

namespace molspo::harness {

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact, "cannot read " + path.string());
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path RunDirectory::require(std::string_view name, std::string_view what) const {
  auto p = path(name);
  if (!std::filesystem::exists(p)) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact,
                       std::string(what) + " not found: " + p.string());
  }
  return p;
}

void RunDirectory::record(const std::string& command, std::uint64_t seed,
                          const std::vector<std::string>& outputs) const {
  using nlohmann::ordered_json;
  const auto manifest_path = path("manifest.json");
  ordered_json manifest = {{"commands", ordered_json::array()}};
  if (std::ifstream in(manifest_path); in) {
    try {
      manifest = ordered_json::parse(in);
    } catch (const ordered_json::exception&) {
      throw HarnessError(HarnessErrorKind::kData, "corrupt manifest: " + manifest_path.string());
    }
  }
  ordered_json entry = {{"command", command}, {"seed", seed}, {"outputs", ordered_json::array()}};
  for (const auto& name : outputs) {
    const auto p = path(name);
    entry["outputs"].push_back(
        {{"path", name}, {"bytes", std::filesystem::file_size(p)}, {"fnv1a64", file_digest(p)}});
  }
  auto& list = manifest["commands"];
  bool replaced = false;
  for (auto& e : list) {
    if (e.value("command", "") == command) {
      e = entry;
      replaced = true;
    }
  }
  if (!replaced) {
    list.push_back(entry);
  }
  std::ofstream out(manifest_path);
  out << manifest.dump(2) << "\n";
}

}  // namespace molspo::harness
