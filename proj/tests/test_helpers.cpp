#include "test_helpers.hpp"

#include <filesystem>

namespace dynpol::testing {

std::vector<std::pair<std::string, Program>> all_facet_programs() {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, Program>> out;
  fs::path root = fs::path(corpus_dir()) / "facets";
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".dpol")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    out.push_back({f.string(), parse_program_file(f.string())});
  return out;
}

}  // namespace dynpol::testing
