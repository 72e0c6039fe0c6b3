#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace molspo::harness {

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

/// Artifacts of one pipeline run live under a single directory, with
/// manifest.json listing, per command, its seed and output digests.
class RunDirectory {
 public:
  /// Creates the directory if needed.
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(std::string_view name) const { return root_ / name; }
  /// Throws HarnessError(kMissingArtifact) unless the artifact exists.
  std::filesystem::path require(std::string_view name, std::string_view what) const;

  /// Replaces any earlier entry for `command`. Outputs are names
  /// relative to the root.
  void record(const std::string& command, std::uint64_t seed,
              const std::vector<std::string>& outputs) const;

 private:
  std::filesystem::path root_;
};

}  // namespace molspo::harness
