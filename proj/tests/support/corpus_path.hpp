#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace molspo::testing {

inline std::string data_path(const std::string& name) {
  return std::string(MOLSPO_DATA_DIR) + "/" + name;
}

inline std::vector<std::string> corpus_lines(std::size_t limit = SIZE_MAX) {
  std::ifstream in(data_path("molecules.smi"));
  std::vector<std::string> out;
  std::string line;
  while (out.size() < limit && std::getline(in, line)) {
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

}  // namespace molspo::testing
