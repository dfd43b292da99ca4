#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "../support/oracles.hpp"
#include "femmir/lexicon.hpp"

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(FEMMIR_TEST_DATA_DIR) / name;
}

inline const femmir::Taxonomy& bundled_taxonomy() {
  static const femmir::Taxonomy t = femmir::Taxonomy::load(test_data("taxonomy.tsv"));
  return t;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("femmir_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
