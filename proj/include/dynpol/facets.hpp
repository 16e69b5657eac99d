#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynpol/conditions.hpp"
#include "dynpol/report.hpp"

namespace dynpol {

enum class Facet { TimeTransitive, Replay, WeakReplay, DirectRelease, Whitelisting };

const char* facet_name(Facet f);        // "T", "R", "WR", "D", "W"
const char* facet_dir_name(Facet f);    // corpus subdirectory

// One facet's corpus entry: the canonical program, the paired application
// context listings, and per-condition rewrites where a condition's policy
// idiom differs (locks, guards, declassify marks).
struct FacetEntry {
  Facet facet;
  Program canonical;
  std::optional<Program> context_secure;
  std::optional<Program> context_insecure;
  std::map<std::string, Program> variants;
};

struct FacetCorpus {
  std::string root;
  std::map<Facet, FacetEntry> entries;
  std::map<Facet, Program> declassify_forms;
  std::shared_ptr<const ForgetfulAutomaton> second_value_automaton;

  static FacetCorpus load(const std::string& dir);

  const FacetEntry& entry(Facet f) const { return entries.at(f); }

  // The program a condition is classified on for a facet.
  const Program& program_for(const std::string& condition, Facet f) const;
};

// Fixed corpus entry for a facet (the canonical encoding).
const Program& canonical_program(const FacetCorpus& corpus, Facet f);

struct TableRow {
  std::string group;      // NI, BI, Epistemic
  std::string condition;
  std::string variant;    // release-policy variant for parametric rows
  std::map<std::string, std::string> marks;  // facet letter -> + - +/- N/A
};

// Classification of one condition across the four tabulated facets.
TableRow classify_condition(const FacetCorpus& corpus,
                            const std::string& condition,
                            const std::string& variant, const Limits& limits);

// The full matrix over every implemented condition, grouped by the nature of
// the condition.
std::vector<TableRow> reproduce_table(const FacetCorpus& corpus,
                                      const Limits& limits,
                                      const std::string& only_group = "");

Json table_json(const std::vector<TableRow>& rows);
std::string table_text(const std::vector<TableRow>& rows);

// Mismatching cells between a computed matrix and the expected golden file,
// as "condition[/variant] facet: got X expected Y" lines.
std::vector<std::string> diff_tables(const Json& got, const Json& expected);

// Rewrites declassify marks into a temporary policy weakening: each marked
// assignment becomes allow-flows, the plain assignment, then the matching
// revokes.
Program copying_release_transform(const Program& p);

// Event skeleton with declaration-order indices, for comparing programs that
// differ only in naming.
struct EventSkeleton {
  int target;
  Value value;
  std::vector<std::pair<int, int>> flows;
  std::vector<int> locks;
  bool release;

  bool operator==(const EventSkeleton&) const = default;
};

std::vector<EventSkeleton> trace_skeleton(const Program& p, const Trace& t);

// True when both programs produce identical event skeletons from every pair
// of index-matched initial stores.
bool same_flow_structure(const Program& a, const Program& b, const Limits& limits);

}  // namespace dynpol
