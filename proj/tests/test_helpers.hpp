#pragma once

#include <string>
#include <vector>

#include "dynpol/facets.hpp"
#include "dynpol/parser.hpp"
#include "dynpol/printer.hpp"

#ifndef DYNPOL_CORPUS_DIR
#define DYNPOL_CORPUS_DIR "corpus/v1"
#endif

namespace dynpol::testing {

inline std::string corpus_dir() { return DYNPOL_CORPUS_DIR; }

inline std::string facet_path(const std::string& facet, const std::string& file) {
  return corpus_dir() + "/facets/" + facet + "/" + file + ".dpol";
}

inline Program load_facet(const std::string& facet, const std::string& file) {
  return parse_program_file(facet_path(facet, file));
}

inline std::string scheme_path(const std::string& name) {
  return corpus_dir() + "/schemes/" + name;
}

// Every .dpol file of the facet corpus (terminating programs only).
std::vector<std::pair<std::string, Program>> all_facet_programs();

// Deterministic linear congruential generator for hand-rolled property tests.
struct Rng {
  unsigned long long state;
  explicit Rng(unsigned long long seed) : state(seed * 2654435769u + 1) {}
  unsigned next(unsigned bound) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<unsigned>((state >> 33) % bound);
  }
};

}  // namespace dynpol::testing
